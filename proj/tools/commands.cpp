#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "nkd/experiment.hpp"
#include "nkd/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace nkd::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingData("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingData("cannot read " + path);
  return in;
}

/// Fills `target` from the config unless the flag was given explicitly.
template <typename T>
void from_config(const json& cfg, const char* key, const CLI::Option* flag, T& target) {
  if (flag->count() > 0 || !cfg.contains(key)) return;
  try {
    target = cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("config key ") + key + ": " + e.what());
  }
}

Model model_arg(const std::string& s) {
  const auto m = parse_model(s);
  if (!m) throw UsageError("unknown model: " + s);
  return *m;
}

ControlMode control_arg(const std::string& s) {
  const auto m = parse_control_mode(s);
  if (!m) throw UsageError("unknown control mode: " + s);
  return *m;
}

// ---- cell flags shared by generate and run ----

struct CellFlags {
  std::string model = "nk";
  int n = 20;
  int k = 0;
  int c = 0;
  int s = 1;
  int d = 0;
  int d_count = -1;  // -1: same as n
  int mutations = 1;
  std::string control = "random_d";
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app) {
    opts["model"] = app->add_option("--model", model, "nk, nkcs, nkd, nkd_dynamic or nkd_subset");
    opts["n"] = app->add_option("--n", n, "genome length");
    opts["k"] = app->add_option("--k", k, "epistatic neighbors per gene");
    opts["c"] = app->add_option("--c", c, "genes read from each partner species (nkcs)");
    opts["s"] = app->add_option("--s", s, "number of partner species (nkcs)");
    opts["d"] = app->add_option("--d", d, "control partners per gene");
    opts["d_count"] = app->add_option("--d-count", d_count, "genes that have control partners (nkd_subset)");
    opts["mutations"] = app->add_option("--mutations", mutations, "mutations per generation");
    opts["control"] = app->add_option("--control", control, "nkd control mode: global, random_d, block, correlated");
  }

  void merge(const json& cfg) {
    from_config(cfg, "model", opts["model"], model);
    from_config(cfg, "n", opts["n"], n);
    from_config(cfg, "k", opts["k"], k);
    from_config(cfg, "c", opts["c"], c);
    from_config(cfg, "s", opts["s"], s);
    from_config(cfg, "d", opts["d"], d);
    from_config(cfg, "d_count", opts["d_count"], d_count);
    from_config(cfg, "mutations", opts["mutations"], mutations);
    from_config(cfg, "control", opts["control"], control);
  }

  CellParams cell() const {
    CellParams p{model_arg(model), n, k, c, s, d, d_count < 0 ? n : d_count, mutations, control_arg(control)};
    p = normalize_cell(p);
    validate_cell(p);
    return p;
  }
};

// ---- output directories ----

/// Files are written into a sibling temp directory that replaces `target`
/// only once everything is on disk.
class StagedDir {
 public:
  StagedDir(fs::path target, bool force) : target_(std::move(target)) {
    if (target_.empty()) throw UsageError("output directory must not be empty");
    if (fs::exists(target_)) {
      if (!fs::is_directory(target_)) throw UsageError(target_.string() + " exists and is not a directory");
      const bool ours = fs::exists(target_ / "manifest.json");
      if (ours && !force) throw UsageError(target_.string() + " already holds a manifest; pass --force to replace it");
      if (!ours && !fs::is_empty(target_)) {
        throw UsageError(target_.string() + " exists and is not an nkd output directory");
      }
    }
    const fs::path parent = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
    fs::create_directories(parent);
    staging_ = parent / (target_.filename().string() + ".partial");
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }

  ~StagedDir() {
    std::error_code ec;
    if (!committed_) fs::remove_all(staging_, ec);
  }

  StagedDir(const StagedDir&) = delete;
  StagedDir& operator=(const StagedDir&) = delete;

  fs::path path(const std::string& rel) const { return staging_ / rel; }

  void commit() {
    if (fs::exists(target_)) fs::remove_all(target_);
    fs::rename(staging_, target_);
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path staging_;
  bool committed_ = false;
};

std::ofstream open_output(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

// ---- plot data ----

struct PlotKey {
  std::string name;
  std::string x_name;
  int x = 0;
};

PlotKey plot_key(const CellSummary& s) {
  const auto& c = s.cell;
  std::string name = "n" + std::to_string(c.n);
  PlotKey key;
  switch (c.model) {
    case Model::nk:
      key.x_name = "k";
      key.x = c.k;
      break;
    case Model::nkcs:
      key.x_name = "k";
      key.x = c.k;
      name += "_c" + std::to_string(c.c) + "_s" + std::to_string(c.s) + "_species" + std::to_string(s.species);
      break;
    case Model::nkd:
      key.x_name = "d";
      key.x = c.d;
      name += "_k" + std::to_string(c.k);
      if (c.control != ControlMode::random_d) name += std::string("_") + control_mode_name(c.control);
      break;
    case Model::nkd_dynamic:
      key.x_name = "d";
      key.x = c.d;
      name += "_k" + std::to_string(c.k);
      break;
    case Model::nkd_subset:
      key.x_name = "d_count";
      key.x = c.d_count;
      name += "_k" + std::to_string(c.k) + "_d" + std::to_string(c.d);
      break;
  }
  if (c.mutations != 1) name += "_m" + std::to_string(c.mutations);
  key.name = std::string(model_name(c.model)) + "_" + name;
  return key;
}

std::vector<std::string> write_plotdata(const StagedDir& dir, const ExperimentSpec& spec,
                                        const std::vector<CellSummary>& summaries) {
  std::map<std::string, std::vector<std::pair<PlotKey, const CellSummary*>>> families;
  for (const auto& s : summaries) {
    if (!s.ok()) continue;
    const auto key = plot_key(s);
    families[key.name].emplace_back(key, &s);
  }
  std::vector<std::string> files;
  for (auto& [name, rows] : families) {
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first.x < b.first.x; });
    const std::string rel = "plotdata/" + name + ".tsv";
    auto out = open_output(dir.path(rel));
    io::write_comment_header(out, spec.master_seed, spec.figure_id);
    out << rows.front().first.x_name << "\tmean\tmin\tmax\n";
    for (const auto& [key, s] : rows) {
      out << key.x << '\t' << io::fixed6(s->stats.mean) << '\t' << io::fixed6(s->stats.min) << '\t'
          << io::fixed6(s->stats.max) << '\n';
    }
    files.push_back(rel);
  }
  return files;
}

// ---- sweeps ----

std::vector<int> int_list(const json& v, const std::string& key) {
  try {
    if (v.is_array()) return v.get<std::vector<int>>();
    return {v.get<int>()};
  } catch (const json::exception&) {
    throw UsageError("grid key " + key + " must be an integer or a list of integers");
  }
}

Grid grid_from_json(const json& g) {
  if (!g.is_object()) throw UsageError("grid must be an object");
  Grid grid;
  for (const auto& [key, value] : g.items()) {
    if (key == "n") grid.n = int_list(value, key);
    else if (key == "k") grid.k = int_list(value, key);
    else if (key == "c") grid.c = int_list(value, key);
    else if (key == "s") grid.s = int_list(value, key);
    else if (key == "d") grid.d = int_list(value, key);
    else if (key == "d_count") grid.d_count = int_list(value, key);
    else if (key == "mutations" || key == "mutations_per_generation") grid.mutations = int_list(value, key);
    else throw UsageError("unknown grid key: " + key);
  }
  // Without d_count every gene is a control node.
  if (!g.contains("d_count")) grid.d_count = grid.n;
  return grid;
}

ExperimentSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("experiment spec must be a JSON object");
  ExperimentSpec spec;
  bool has_grid = false;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "figure_id") spec.figure_id = value.get<std::string>();
      else if (key == "model") spec.model = model_arg(value.get<std::string>());
      else if (key == "control") spec.control = control_arg(value.get<std::string>());
      else if (key == "landscapes_per_cell") spec.landscapes_per_cell = value.get<int>();
      else if (key == "starts_per_landscape") spec.starts_per_landscape = value.get<int>();
      else if (key == "generations") spec.generations = value.get<int>();
      else if (key == "master_seed") spec.master_seed = value.get<std::uint64_t>();
      else if (key == "grid" || key == "grids") {
        if (has_grid) throw UsageError("give either grid or grids, not both");
        has_grid = true;
        spec.grids.clear();
        if (value.is_array()) {
          for (const auto& g : value) spec.grids.push_back(grid_from_json(g));
        } else {
          spec.grids.push_back(grid_from_json(value));
        }
      } else {
        throw UsageError("unknown spec key: " + key);
      }
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("experiment spec: ") + e.what());
  }
  if (!has_grid) throw UsageError("experiment spec needs a grid");
  return spec;
}

int default_workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

/// Runs a sweep and writes its output directory.
void execute_sweep(const ExperimentSpec& spec, int workers, const fs::path& out_dir, bool force,
                   const std::string& command, const std::string& config_path, std::ostream& out, std::ostream& err) {
  StagedDir dir(out_dir, force);
  err << "running " << expand_cells(spec).size() << " cells on " << workers << " workers\n";
  const auto result = run_experiment(spec, workers);

  {
    auto f = open_output(dir.path("runs.csv"));
    io::write_runs(f, result);
  }
  {
    auto f = open_output(dir.path("summary.csv"));
    io::write_summary(f, spec.master_seed, spec.figure_id, result.summaries);
  }
  std::vector<std::pair<CellRef, CellRef>> pairs;
  for (const auto& p : default_comparisons(spec)) {
    auto ok = [&](const CellRef& r) {
      try {
        find_summary(result.summaries, r);
        return true;
      } catch (const MissingCell&) {
        return false;
      }
    };
    if (ok(p.first) && ok(p.second)) pairs.push_back(p);
  }
  {
    auto f = open_output(dir.path("tests.csv"));
    io::write_tests(f, spec.master_seed, spec.figure_id, compare_cells(result.summaries, pairs));
  }
  const auto plots = write_plotdata(dir, spec, result.summaries);

  std::size_t failed = 0;
  for (const auto& s : result.summaries) failed += s.ok() ? 0 : 1;
  json manifest = {
      {"tool_version", std::string(kToolVersion)},
      {"command", command},
      {"figure_id", spec.figure_id},
      {"model", model_name(spec.model)},
      {"master_seed", spec.master_seed},
      {"config", config_path.empty() ? json(nullptr) : json(config_path)},
      {"output_dir", out_dir.string()},
      {"workers", workers},
      {"landscapes_per_cell", spec.landscapes_per_cell},
      {"starts_per_landscape", spec.starts_per_landscape},
      {"generations", spec.generations},
      {"cells", result.cells.size()},
      {"failed_cells", failed},
      {"files", json::array({"runs.csv", "summary.csv", "tests.csv"})},
      {"plotdata", plots},
  };
  {
    auto f = open_output(dir.path("manifest.json"));
    f << manifest.dump(2) << '\n';
  }
  dir.commit();
  if (failed > 0) err << failed << " cell(s) could not be run; see the status column of summary.csv\n";
  out << "wrote " << out_dir.string() << '\n';
}

// ---- compare ----

struct Filter {
  std::vector<std::pair<std::string, std::string>> terms;
  int species = 0;
  std::string text;
};

Filter parse_filter(const std::string& text) {
  Filter f;
  f.text = text;
  for (auto part : io::split(text, ',')) {
    part = io::trim(part);
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw UsageError("filter term without '=': " + std::string(part));
    std::string key(io::trim(part.substr(0, eq)));
    std::string value(io::trim(part.substr(eq + 1)));
    if (key == "species") {
      f.species = io::parse_int<int>(value);
      continue;
    }
    if (key == "m" || key == "mutations_per_gen") key = "mutations";
    if (key == "control_mode") key = "control";
    static const std::vector<std::string> known{"model", "n", "k", "c", "s", "d", "d_count", "control", "mutations"};
    if (std::find(known.begin(), known.end(), key) == known.end()) throw UsageError("unknown filter key: " + key);
    f.terms.emplace_back(key, value);
  }
  return f;
}

std::string field_of(const CellParams& c, const std::string& key) {
  if (key == "model") return model_name(c.model);
  if (key == "control") return control_label(c);
  if (key == "n") return std::to_string(c.n);
  if (key == "k") return std::to_string(c.k);
  if (key == "c") return std::to_string(c.c);
  if (key == "s") return std::to_string(c.s);
  if (key == "d") return std::to_string(c.d);
  if (key == "d_count") return std::to_string(c.d_count);
  return std::to_string(c.mutations);
}

CellRef resolve(const std::vector<CellParams>& cells, const Filter& f) {
  std::vector<CellParams> hits;
  for (const auto& c : cells) {
    bool match = true;
    for (const auto& [key, value] : f.terms) match = match && field_of(c, key) == value;
    if (match) hits.push_back(c);
  }
  if (hits.empty()) throw MissingData("no cell matches \"" + f.text + "\"");
  if (hits.size() > 1) {
    std::string msg = "\"" + f.text + "\" matches " + std::to_string(hits.size()) + " cells, e.g. " +
                      cell_key(hits[0]) + " and " + cell_key(hits[1]);
    throw UsageError(msg);
  }
  return {hits[0], f.species};
}

// ---- subcommands ----

int cmd_generate(CellFlags& flags, std::uint64_t seed, int landscape_idx, const std::string& out_path,
                 const std::string& control_out, std::ostream& out, std::ostream& err) {
  const CellParams cell = flags.cell();
  const SeedPath path = landscape_path(seed, cell, landscape_idx);
  RandomStream stream(path);
  std::ostringstream dump;
  std::optional<NkLandscape> landscape;
  if (cell.model == Model::nkcs) {
    io::write_ecosystem(dump, Ecosystem::generate(cell.n, cell.k, cell.c, cell.s, stream, path));
  } else {
    landscape = NkLandscape::generate(cell.n, cell.k, stream, path);
    io::write_landscape(dump, *landscape);
  }
  if (!control_out.empty()) {
    if (!landscape) throw UsageError("--control-out needs an NK-family model");
    auto f = open_output(control_out);
    io::write_control(f, make_control(cell, *landscape, path));
  }
  if (out_path.empty()) {
    out << dump.str();
    err << "seed_path=" << path.to_string() << '\n';
  } else {
    auto f = open_output(out_path);
    f << dump.str();
    out << "seed_path=" << path.to_string() << '\n';
  }
  return kOk;
}

int cmd_run(CellFlags& flags, std::uint64_t seed, int generations, int landscape_idx, int start_idx,
            const std::string& csv_path, std::ostream& out) {
  const CellParams cell = flags.cell();
  require(generations >= 0, "generations must be >= 0");
  require(landscape_idx >= 0 && start_idx >= 0, "indices must be >= 0");
  const auto records = run_single(cell, seed, landscape_idx, start_idx, generations);
  for (const auto& r : records) out << io::fixed6(r.final_fitness) << '\n';
  if (!csv_path.empty()) {
    const bool fresh = !fs::exists(csv_path) || fs::file_size(csv_path) == 0;
    if (fs::path(csv_path).has_parent_path()) fs::create_directories(fs::path(csv_path).parent_path());
    std::ofstream f(csv_path, std::ios::app | std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + csv_path);
    if (fresh) {
      io::write_comment_header(f, seed, "run");
      f << io::kRunsColumns << '\n';
    }
    for (const auto& r : records) io::write_run_row(f, "run", r);
  }
  return kOk;
}

int cmd_compare(const std::string& runs_path, const std::string& a, const std::string& b,
                const std::string& out_path, std::ostream& out) {
  auto in = open_input(runs_path);
  const auto table = io::read_runs(in);
  const auto summaries = summarize(table.cells, table.runs);
  const CellRef ra = resolve(table.cells, parse_filter(a));
  const CellRef rb = resolve(table.cells, parse_filter(b));
  std::vector<CellComparison> tests;
  try {
    tests = compare_cells(summaries, {{ra, rb}});
  } catch (const MissingCell& e) {
    throw MissingData(e.what());
  }
  if (out_path.empty()) {
    io::write_tests(out, table.master_seed, table.figure_id, tests);
  } else {
    auto f = open_output(out_path);
    io::write_tests(f, table.master_seed, table.figure_id, tests);
    const auto& r = tests[0].report;
    out << "t=" << io::round_trip(r.t_statistic) << " df=" << io::round_trip(r.degrees_of_freedom)
        << " p=" << io::round_trip(r.p_value) << (r.significant ? " significant" : " not significant") << '\n';
  }
  return kOk;
}

int cmd_stats(const std::string& runs_path, const std::string& out_path, const std::string& tests_path,
              std::ostream& out) {
  auto in = open_input(runs_path);
  const auto table = io::read_runs(in);
  const auto summaries = summarize(table.cells, table.runs);
  if (out_path.empty()) {
    io::write_summary(out, table.master_seed, table.figure_id, summaries);
  } else {
    auto f = open_output(out_path);
    io::write_summary(f, table.master_seed, table.figure_id, summaries);
  }
  if (!tests_path.empty()) {
    std::vector<std::pair<CellRef, CellRef>> pairs;
    for (const auto& p : default_comparisons(table.cells)) {
      const auto count = [&](const CellRef& r) {
        return std::count_if(summaries.begin(), summaries.end(),
                             [&](const CellSummary& s) { return s.cell == r.cell && s.species == r.species; });
      };
      if (count(p.first) && count(p.second)) pairs.push_back(p);
    }
    auto f = open_output(tests_path);
    io::write_tests(f, table.master_seed, table.figure_id, compare_cells(summaries, pairs));
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"NK, NKCS and NKD landscape experiments", "nkd"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::uint64_t seed = 0;
  int workers = default_workers();
  bool force = false;

  // generate
  auto* gen = app.add_subcommand("generate", "write a landscape or ecosystem dump");
  CellFlags gen_cell;
  gen_cell.add(gen);
  int gen_landscape = 0;
  std::string gen_out, gen_control_out;
  gen->add_option("--seed", seed, "master seed");
  gen->add_option("--landscape-index", gen_landscape, "landscape index within the cell");
  gen->add_option("--out", gen_out, "dump file (default: standard output)");
  gen->add_option("--control-out", gen_control_out, "also write the cell's control structure here");

  // run
  auto* runc = app.add_subcommand("run", "run one seeded walk and print its final fitness");
  CellFlags run_cell;
  run_cell.add(runc);
  int run_generations = 5000, run_landscape = 0, run_start = 0;
  std::string run_csv = "runs.csv", run_config;
  auto* seed_opt = runc->add_option("--seed", seed, "master seed");
  auto* gens_opt = runc->add_option("--generations", run_generations, "generations");
  auto* lidx_opt = runc->add_option("--landscape-index", run_landscape, "landscape index within the cell");
  auto* sidx_opt = runc->add_option("--start-index", run_start, "start index within the landscape");
  auto* csv_opt = runc->add_option("--csv", run_csv, "runs.csv to append to (empty string: none)");
  runc->add_option("--config", run_config, "JSON file with any of the flags above; flags win");

  // figure
  auto* fig = app.add_subcommand("figure", "run a figure preset");
  std::string fig_id, fig_out;
  int fig_landscapes = 0, fig_starts = 0, fig_generations = -1;
  fig->add_option("figure_id", fig_id, "fig2, fig4, fig6, fig7, fig8, fig9 or fig10")->required();
  fig->add_option("--seed", seed, "master seed");
  fig->add_option("--workers", workers, "worker threads");
  fig->add_option("--out", fig_out, "output directory (default: out/<figure_id>)");
  fig->add_flag("--force", force, "replace an existing output directory");
  fig->add_option("--landscapes", fig_landscapes, "override landscapes per cell");
  fig->add_option("--starts", fig_starts, "override starts per landscape");
  fig->add_option("--generations", fig_generations, "override generations per walk");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a custom experiment spec (JSON)");
  std::string sweep_spec, sweep_out;
  sweep->add_option("spec", sweep_spec, "experiment spec file")->required();
  auto* sweep_seed = sweep->add_option("--seed", seed, "master seed (overrides the file)");
  sweep->add_option("--workers", workers, "worker threads");
  sweep->add_option("--out", sweep_out, "output directory (default: out/<figure_id>)");
  sweep->add_flag("--force", force, "replace an existing output directory");

  // compare
  auto* cmp = app.add_subcommand("compare", "Welch test between two cells of a runs.csv");
  std::string cmp_runs, cmp_a, cmp_b, cmp_out;
  cmp->add_option("--runs", cmp_runs, "runs.csv")->required();
  cmp->add_option("--a", cmp_a, "first cell, e.g. n=20,k=4,d=12")->required();
  cmp->add_option("--b", cmp_b, "second cell")->required();
  cmp->add_option("--out", cmp_out, "tests.csv to write (default: standard output)");

  // stats
  auto* st = app.add_subcommand("stats", "re-aggregate a runs.csv");
  std::string st_runs, st_out, st_tests;
  st->add_option("--runs", st_runs, "runs.csv")->required();
  st->add_option("--out", st_out, "summary.csv to write (default: standard output)");
  st->add_option("--tests", st_tests, "also write the default comparisons here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) {
      err << "master_seed=" << seed << '\n';
      return cmd_generate(gen_cell, seed, gen_landscape, gen_out, gen_control_out, out, err);
    }
    if (runc->parsed()) {
      if (!run_config.empty()) {
        const json cfg = load_json(run_config);
        if (!cfg.is_object()) throw UsageError(run_config + ": config must be a JSON object");
        run_cell.merge(cfg);
        from_config(cfg, "seed", seed_opt, seed);
        from_config(cfg, "generations", gens_opt, run_generations);
        from_config(cfg, "landscape_index", lidx_opt, run_landscape);
        from_config(cfg, "start_index", sidx_opt, run_start);
        from_config(cfg, "csv", csv_opt, run_csv);
      }
      err << "master_seed=" << seed << '\n';
      return cmd_run(run_cell, seed, run_generations, run_landscape, run_start, run_csv, out);
    }
    if (fig->parsed()) {
      const auto& ids = figure_ids();
      if (std::find(ids.begin(), ids.end(), fig_id) == ids.end()) throw UsageError("unknown figure id: " + fig_id);
      ExperimentSpec spec = figure_preset(fig_id);
      spec.master_seed = seed;
      if (fig_landscapes > 0) spec.landscapes_per_cell = fig_landscapes;
      if (fig_starts > 0) spec.starts_per_landscape = fig_starts;
      if (fig_generations >= 0) spec.generations = fig_generations;
      err << "master_seed=" << seed << '\n';
      require(workers >= 1, "workers must be >= 1");
      execute_sweep(spec, workers, fig_out.empty() ? fs::path("out") / fig_id : fs::path(fig_out), force,
                    "figure", "", out, err);
      return kOk;
    }
    if (sweep->parsed()) {
      ExperimentSpec spec = spec_from_json(load_json(sweep_spec));
      if (sweep_seed->count() > 0) spec.master_seed = seed;
      err << "master_seed=" << spec.master_seed << '\n';
      require(workers >= 1, "workers must be >= 1");
      execute_sweep(spec, workers, sweep_out.empty() ? fs::path("out") / spec.figure_id : fs::path(sweep_out), force,
                    "sweep", sweep_spec, out, err);
      return kOk;
    }
    if (cmp->parsed()) return cmd_compare(cmp_runs, cmp_a, cmp_b, cmp_out, out);
    if (st->parsed()) return cmd_stats(st_runs, st_out, st_tests, out);
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const TableSizeExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const MissingData& e) {
    err << "error: " << e.what() << '\n';
    return kMissingData;
  } catch (const io::FormatError& e) {
    err << "error: malformed input: " << e.what() << '\n';
    return kMissingData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace nkd::cli
