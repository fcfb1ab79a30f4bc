#pragma once

#include <vector>

namespace welch_reference {

struct Reference {
  const char* name;
  std::vector<double> a;
  std::vector<double> b;
  double t;
  double df;
  double p;
};

// Frozen output of scipy.stats.ttest_ind(a, b, equal_var=False).
inline const std::vector<Reference>& references() {
  static const std::vector<Reference> refs{
      {"separated", {0.60, 0.62, 0.61, 0.63}, {0.50, 0.52, 0.51, 0.53}, 10.95445115010331, 6.0, 3.436402807612172e-05},
      {"close_means",
       {0.71, 0.69, 0.72, 0.70, 0.68, 0.73, 0.70},
       {0.70, 0.71, 0.69, 0.72, 0.70},
       0.03460297379202805,
       9.985545419348634,
       0.9730782657595212},
      {"large_t",
       {10.0, 10.1, 9.9, 10.05},
       {1.0, 1.2, 0.8, 1.1, 0.9},
       109.10891679964041,
       6.327024701978611,
       1.3323539740634324e-11},
      {"fractional",
       {3.2, 4.8, 1.1, 7.5, 2.9, 6.6, 5.0, 4.1},
       {2.7, 3.3, 2.9, 3.1},
       1.894744493140688,
       7.430594945841667,
       0.09754587173406969},
      {"unequal_var",
       {1.1, 2.3, 0.7, 3.9, 2.2, 1.8},
       {2.0, 2.1, 1.9, 2.05, 1.45},
       0.21172221918089373,
       5.6479595200337505,
       0.8397554676266621},
      {"one_constant", {0.5, 0.5, 0.5}, {0.4, 0.65, 0.55, 0.45}, -0.22549380840084987, 3.0, 0.8360832258079618},
      {"fitness_like",
       {0.681, 0.702, 0.655, 0.713, 0.690, 0.677, 0.699, 0.664, 0.708, 0.671},
       {0.652, 0.641, 0.668, 0.633, 0.659, 0.647, 0.662, 0.638, 0.671, 0.650},
       4.592978740541797,
       15.526099010135665,
       0.0003230859867122967},
  };
  return refs;
}

}  // namespace welch_reference
