#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "nkd/coevolution.hpp"
#include "nkd/control.hpp"
#include "nkd/errors.hpp"
#include "nkd/landscape.hpp"
#include "nkd/prng.hpp"
#include "nkd/stats.hpp"
#include "nkd/walk.hpp"

namespace nkd {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum class Model { nk, nkcs, nkd, nkd_dynamic, nkd_subset };

inline const char* model_name(Model m) {
  switch (m) {
    case Model::nk: return "nk";
    case Model::nkcs: return "nkcs";
    case Model::nkd: return "nkd";
    case Model::nkd_dynamic: return "nkd_dynamic";
    case Model::nkd_subset: return "nkd_subset";
  }
  return "?";
}

inline std::optional<Model> parse_model(std::string_view s) {
  for (auto m : {Model::nk, Model::nkcs, Model::nkd, Model::nkd_dynamic, Model::nkd_subset}) {
    if (s == model_name(m)) return m;
  }
  return std::nullopt;
}

/// Parameters of one grid cell. Fields a model does not use are normalized
/// by normalize_cell() so that equal cells compare and hash equal.
struct CellParams {
  Model model = Model::nk;
  int n = 20;
  int k = 0;
  int c = 0;
  int s = 0;
  int d = 0;
  int d_count = 0;
  int mutations = 1;
  ControlMode control = ControlMode::global;  // only varied for model nkd

  friend bool operator==(const CellParams&, const CellParams&) = default;
};

/// Label written to the control_mode column.
inline std::string control_label(const CellParams& cell) {
  switch (cell.model) {
    case Model::nk: return "global";
    case Model::nkcs: return "species";
    case Model::nkd: return control_mode_name(cell.control);
    case Model::nkd_dynamic: return "dynamic";
    case Model::nkd_subset: return "subset";
  }
  return "?";
}

inline CellParams normalize_cell(CellParams cell) {
  switch (cell.model) {
    case Model::nk:
      cell.control = ControlMode::global;
      cell.d = cell.n - 1;
      cell.d_count = cell.n;
      cell.c = cell.s = 0;
      break;
    case Model::nkcs:
      cell.control = ControlMode::global;
      cell.d = cell.n - 1;
      cell.d_count = cell.n;
      break;
    case Model::nkd:
      cell.c = cell.s = 0;
      cell.d_count = cell.n;
      if (cell.control == ControlMode::global) cell.d = cell.n - 1;
      if (cell.control == ControlMode::subset) cell.control = ControlMode::random_d;
      break;
    case Model::nkd_dynamic:
      cell.control = ControlMode::random_d;
      cell.c = cell.s = 0;
      cell.d_count = cell.n;
      break;
    case Model::nkd_subset:
      cell.control = ControlMode::subset;
      cell.c = cell.s = 0;
      break;
  }
  return cell;
}

inline std::string cell_key(const CellParams& cell) {
  return std::string(model_name(cell.model)) + " n=" + std::to_string(cell.n) + " k=" + std::to_string(cell.k) +
         " c=" + std::to_string(cell.c) + " s=" + std::to_string(cell.s) + " d=" + std::to_string(cell.d) +
         " d_count=" + std::to_string(cell.d_count) + " control=" + control_label(cell) +
         " m=" + std::to_string(cell.mutations);
}

/// FNV-1a of the cell key; seeds depend on what a cell is, not on where it
/// sits in a grid.
inline std::uint64_t cell_hash(const CellParams& cell) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : cell_key(cell)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Throws InvalidParameter / TableSizeExceeded if the cell cannot be run.
inline void validate_cell(const CellParams& cell) {
  require(cell.mutations >= 1 && cell.mutations <= cell.n, "mutations_per_generation must be in [1, n]");
  switch (cell.model) {
    case Model::nk:
      NkLandscape::validate(cell.n, cell.k);
      break;
    case Model::nkcs:
      Ecosystem::validate(cell.n, cell.k, cell.c, cell.s);
      require(cell.mutations == 1, "nkcs supports one mutation per generation");
      break;
    case Model::nkd:
    case Model::nkd_dynamic:
      NkLandscape::validate(cell.n, cell.k);
      require(cell.d >= 0 && cell.d <= cell.n - 1, "d must be in [0, n-1]");
      if (cell.control == ControlMode::block) require(cell.n % (cell.d + 1) == 0, "block size d+1 must divide n");
      break;
    case Model::nkd_subset:
      NkLandscape::validate(cell.n, cell.k);
      require(cell.d >= 0 && cell.d <= cell.n - 1, "d must be in [0, n-1]");
      require(cell.d_count >= 0 && cell.d_count <= cell.n, "d_count must be in [0, n]");
      break;
  }
}

/// Cartesian product block of a sweep.
struct Grid {
  std::vector<int> n{20};
  std::vector<int> k{0};
  std::vector<int> c{0};
  std::vector<int> s{1};
  std::vector<int> d{0};
  std::vector<int> d_count{0};
  std::vector<int> mutations{1};
};

struct ExperimentSpec {
  std::string figure_id = "custom";
  Model model = Model::nk;
  ControlMode control = ControlMode::random_d;  // nkd only
  std::vector<Grid> grids{Grid{}};
  int landscapes_per_cell = 10;
  int starts_per_landscape = 10;
  int generations = 5000;
  std::uint64_t master_seed = 0;
};

inline std::vector<CellParams> expand_cells(const ExperimentSpec& spec) {
  std::vector<CellParams> cells;
  for (const auto& g : spec.grids) {
    for (int n : g.n)
      for (int k : g.k)
        for (int c : g.c)
          for (int s : g.s)
            for (int d : g.d)
              for (int dc : g.d_count)
                for (int m : g.mutations) {
                  CellParams cell{spec.model, n, k, c, s, d, dc, m, spec.control};
                  cell = normalize_cell(cell);
                  if (std::find(cells.begin(), cells.end(), cell) == cells.end()) cells.push_back(cell);
                }
  }
  return cells;
}

struct RunRecord {
  CellParams cell;
  int landscape_idx = 0;
  int start_idx = 0;
  int species = 0;
  double final_fitness = 0.0;
  long accepted_count = 0;
};

struct CellSummary {
  CellParams cell;
  int species = 0;
  std::string status = "ok";
  std::size_t run_count = 0;
  Moments stats;
  std::vector<double> values;  // (landscape, start) order

  bool ok() const { return status == "ok"; }
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<CellParams> cells;
  std::vector<RunRecord> runs;
  std::vector<CellSummary> summaries;
};

inline SeedPath cell_path(std::uint64_t master_seed, const CellParams& cell) {
  return SeedPath(master_seed).child(Purpose::cell, cell_hash(cell));
}

inline SeedPath landscape_path(std::uint64_t master_seed, const CellParams& cell, int landscape_idx) {
  return cell_path(master_seed, cell).child(Purpose::landscape, static_cast<std::uint64_t>(landscape_idx));
}

inline SeedPath run_path(std::uint64_t master_seed, const CellParams& cell, int landscape_idx, int start_idx) {
  return landscape_path(master_seed, cell, landscape_idx).child(Purpose::start, static_cast<std::uint64_t>(start_idx));
}

/// Control structure of one NK-family instance; built once per landscape.
inline ControlStructure make_control(const CellParams& cell, const NkLandscape& landscape, const SeedPath& lpath) {
  const RandomStream stream(lpath.child(Purpose::control, 0));
  switch (cell.model) {
    case Model::nk:
    case Model::nkcs:
    case Model::nkd_dynamic:
      return build_global(cell.n);
    case Model::nkd_subset:
      return build_subset(cell.n, cell.d, cell.d_count, stream);
    case Model::nkd:
      switch (cell.control) {
        case ControlMode::global: return build_global(cell.n);
        case ControlMode::random_d:
        case ControlMode::subset: return build_random(cell.n, cell.d, stream);
        case ControlMode::block: return build_block(cell.n, cell.d + 1);
        case ControlMode::correlated: return build_correlated(landscape, cell.d, stream);
      }
  }
  return build_global(cell.n);
}

inline WalkConfig make_walk_config(const CellParams& cell, int generations) {
  WalkConfig cfg;
  cfg.generations = generations;
  cfg.mutations_per_generation = cell.mutations;
  cfg.dynamic_control = cell.model == Model::nkd_dynamic;
  cfg.dynamic_d = cell.d;
  return cfg;
}

/// All runs of one (cell, landscape) pair, in start order; NKCS cells give
/// one record per species per start.
inline std::vector<RunRecord> run_landscape(const CellParams& cell, std::uint64_t master_seed, int landscape_idx,
                                            int starts, int generations) {
  std::vector<RunRecord> out;
  const SeedPath lpath = landscape_path(master_seed, cell, landscape_idx);
  RandomStream lstream(lpath);
  if (cell.model == Model::nkcs) {
    const Ecosystem eco = Ecosystem::generate(cell.n, cell.k, cell.c, cell.s, lstream, lpath);
    for (int st = 0; st < starts; ++st) {
      const auto res = coevolve(eco, generations, lpath.child(Purpose::start, static_cast<std::uint64_t>(st)));
      for (int sp = 0; sp < eco.species_count(); ++sp) {
        const auto& r = res.species[static_cast<std::size_t>(sp)];
        out.push_back({cell, landscape_idx, st, sp, r.final_fitness, r.accepted_count});
      }
    }
    return out;
  }
  const NkLandscape landscape = NkLandscape::generate(cell.n, cell.k, lstream, lpath);
  const ControlStructure control = make_control(cell, landscape, lpath);
  const WalkConfig cfg = make_walk_config(cell, generations);
  for (int st = 0; st < starts; ++st) {
    const auto r = run_walk(landscape, control, cfg, lpath.child(Purpose::start, static_cast<std::uint64_t>(st)));
    out.push_back({cell, landscape_idx, st, 0, r.final_fitness, r.accepted_count});
  }
  return out;
}

/// One start of one landscape, as run_landscape() would produce it.
inline std::vector<RunRecord> run_single(const CellParams& cell, std::uint64_t master_seed, int landscape_idx,
                                         int start_idx, int generations) {
  const SeedPath lpath = landscape_path(master_seed, cell, landscape_idx);
  const SeedPath rpath = lpath.child(Purpose::start, static_cast<std::uint64_t>(start_idx));
  RandomStream lstream(lpath);
  std::vector<RunRecord> out;
  if (cell.model == Model::nkcs) {
    const Ecosystem eco = Ecosystem::generate(cell.n, cell.k, cell.c, cell.s, lstream, lpath);
    const auto res = coevolve(eco, generations, rpath);
    for (int sp = 0; sp < eco.species_count(); ++sp) {
      const auto& r = res.species[static_cast<std::size_t>(sp)];
      out.push_back({cell, landscape_idx, start_idx, sp, r.final_fitness, r.accepted_count});
    }
    return out;
  }
  const NkLandscape landscape = NkLandscape::generate(cell.n, cell.k, lstream, lpath);
  const auto r = run_walk(landscape, make_control(cell, landscape, lpath), make_walk_config(cell, generations), rpath);
  out.push_back({cell, landscape_idx, start_idx, 0, r.final_fitness, r.accepted_count});
  return out;
}

/// Group run records into per-(cell, species) summaries, cells in `cells`
/// order. Values are taken in (landscape, start) order.
inline std::vector<CellSummary> summarize(const std::vector<CellParams>& cells, const std::vector<RunRecord>& runs) {
  std::vector<CellSummary> out;
  for (const auto& cell : cells) {
    std::vector<const RunRecord*> mine;
    int species_count = 1;
    for (const auto& r : runs) {
      if (r.cell == cell) {
        mine.push_back(&r);
        species_count = std::max(species_count, r.species + 1);
      }
    }
    std::sort(mine.begin(), mine.end(), [](const RunRecord* a, const RunRecord* b) {
      return std::tie(a->landscape_idx, a->start_idx) < std::tie(b->landscape_idx, b->start_idx);
    });
    for (int sp = 0; sp < species_count; ++sp) {
      CellSummary s;
      s.cell = cell;
      s.species = sp;
      for (const auto* r : mine) {
        if (r->species == sp) s.values.push_back(r->final_fitness);
      }
      s.run_count = s.values.size();
      s.stats = describe(s.values);
      out.push_back(std::move(s));
    }
  }
  return out;
}

/// Runs every cell of the sweep on `workers` threads. Work is split into
/// (cell, landscape) units whose results land in fixed slots, so output is
/// independent of the worker count. Infeasible cells get an error status.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, int workers = 1) {
  require(spec.landscapes_per_cell >= 1, "landscapes_per_cell must be >= 1");
  require(spec.starts_per_landscape >= 1, "starts_per_landscape must be >= 1");
  require(spec.generations >= 0, "generations must be >= 0");
  ExperimentResult result;
  result.spec = spec;
  result.cells = expand_cells(spec);

  std::vector<std::string> errors(result.cells.size());
  std::vector<std::pair<std::size_t, int>> units;
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    try {
      validate_cell(result.cells[i]);
      for (int l = 0; l < spec.landscapes_per_cell; ++l) units.emplace_back(i, l);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  std::vector<std::vector<RunRecord>> slots(units.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t u = next++; u < units.size(); u = next++) {
      try {
        const auto [cell_idx, l] = units[u];
        slots[u] = run_landscape(result.cells[cell_idx], spec.master_seed, l, spec.starts_per_landscape,
                                 spec.generations);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int pool = std::max(1, std::min<int>(workers, static_cast<int>(units.size())));
  if (pool == 1) {
    work();
  } else {
    std::vector<std::jthread> threads;
    for (int t = 0; t < pool; ++t) threads.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& slot : slots) {
    for (auto& r : slot) result.runs.push_back(std::move(r));
  }
  result.summaries = summarize(result.cells, result.runs);
  for (auto& s : result.summaries) {
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
      if (result.cells[i] == s.cell && !errors[i].empty()) s.status = errors[i];
    }
  }
  return result;
}

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig2", "fig4", "fig6", "fig7", "fig8", "fig9", "fig10"};
  return ids;
}

/// Canonical sweep for each reproduced figure.
inline ExperimentSpec figure_preset(std::string_view id) {
  ExperimentSpec spec;
  spec.figure_id = std::string(id);
  const std::vector<int> ks{0, 2, 4, 6, 8, 10, 15};
  const std::vector<int> d20{0, 2, 4, 8, 12, 16, 19};
  const std::vector<int> d100{0, 10, 20, 40, 60, 80, 99};
  Grid g;
  if (id == "fig2") {
    spec.model = Model::nk;
    g.n = {20, 100};
    g.k = ks;
    spec.grids = {g};
  } else if (id == "fig4") {
    spec.model = Model::nkcs;
    g.n = {20, 100};
    g.s = {1};
    g.k = {0, 2, 4, 6, 8, 10};
    g.c = {1, 2, 3, 4, 5};
    spec.grids = {g};
  } else if (id == "fig6" || id == "fig7") {
    spec.model = Model::nkd;
    g.n = {id == "fig6" ? 20 : 100};
    g.k = ks;
    g.d = id == "fig6" ? d20 : d100;
    spec.grids = {g};
  } else if (id == "fig8") {
    spec.model = Model::nkd_dynamic;
    Grid small = g;
    small.n = {20};
    small.k = ks;
    small.d = d20;
    Grid large = g;
    large.n = {100};
    large.k = ks;
    large.d = d100;
    spec.grids = {small, large};
  } else if (id == "fig9" || id == "fig10") {
    spec.model = Model::nkd_subset;
    g.k = ks;
    if (id == "fig9") {
      g.n = {20};
      g.d = {4, 8, 12};
      g.d_count = {4, 8, 12, 16, 20};
    } else {
      g.n = {100};
      g.d = {20, 40, 60};
      g.d_count = {20, 40, 60, 80, 100};
    }
    spec.grids = {g};
  } else {
    throw InvalidParameter("unknown figure id: " + std::string(id));
  }
  return spec;
}

/// A cell plus the species whose values are meant (0 outside NKCS).
struct CellRef {
  CellParams cell;
  int species = 0;
  friend bool operator==(const CellRef&, const CellRef&) = default;
};

struct CellComparison {
  CellRef a;
  CellRef b;
  TestReport report;
};

class MissingCell : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const CellSummary& find_summary(const std::vector<CellSummary>& summaries, const CellRef& ref) {
  for (const auto& s : summaries) {
    if (s.cell == ref.cell && s.species == ref.species) {
      if (!s.ok()) throw MissingCell("cell has no runs (" + s.status + "): " + cell_key(ref.cell));
      return s;
    }
  }
  throw MissingCell("missing cell: " + cell_key(ref.cell) + " species=" + std::to_string(ref.species));
}

inline std::vector<CellComparison> compare_cells(const std::vector<CellSummary>& summaries,
                                                 const std::vector<std::pair<CellRef, CellRef>>& pairs) {
  std::vector<CellComparison> out;
  for (const auto& [a, b] : pairs) {
    const auto& sa = find_summary(summaries, a);
    const auto& sb = find_summary(summaries, b);
    out.push_back({a, b, welch_t_test(sa.values, sb.values)});
  }
  return out;
}

/// Pairs a figure's tests.csv reports: every cell against the reference
/// cell of its curve (K vs N for fig2, C=1 for fig4, D=N-1 for the NKD
/// figures, d=N for the subset figures).
inline std::vector<std::pair<CellRef, CellRef>> default_comparisons(const std::vector<CellParams>& cells) {
  std::vector<std::pair<CellRef, CellRef>> pairs;
  auto has = [&](const CellParams& c) { return std::find(cells.begin(), cells.end(), c) != cells.end(); };
  for (const auto& cell : cells) {
    CellParams ref = cell;
    switch (cell.model) {
      case Model::nk:
        if (cell.n == 20) {
          ref.n = 100;
          ref = normalize_cell(ref);
          if (has(ref)) pairs.push_back({{cell, 0}, {ref, 0}});
        }
        ref = cell;
        ref.k = 4;
        if (cell.k != 4 && has(ref)) pairs.push_back({{cell, 0}, {ref, 0}});
        continue;
      case Model::nkcs:
        ref.c = 1;
        break;
      case Model::nkd:
      case Model::nkd_dynamic:
        ref.d = cell.n - 1;
        break;
      case Model::nkd_subset:
        ref.d_count = cell.n;
        break;
    }
    if (!(ref == cell) && has(ref)) pairs.push_back({{cell, 0}, {ref, 0}});
  }
  return pairs;
}

inline std::vector<std::pair<CellRef, CellRef>> default_comparisons(const ExperimentSpec& spec) {
  return default_comparisons(expand_cells(spec));
}

}  // namespace nkd
