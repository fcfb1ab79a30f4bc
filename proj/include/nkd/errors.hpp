#pragma once

#include <stdexcept>
#include <string>

namespace nkd {

/// A model or experiment parameter outside its documented range.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested fitness table would exceed 2^26 entries per gene.
class TableSizeExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr int kMaxTableBits = 26;

inline void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidParameter(message);
}

}  // namespace nkd
