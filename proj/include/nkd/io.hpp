#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nkd/coevolution.hpp"
#include "nkd/control.hpp"
#include "nkd/errors.hpp"
#include "nkd/experiment.hpp"
#include "nkd/landscape.hpp"

namespace nkd::io {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that reads back to the same double.
inline std::string round_trip(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string hex_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

inline double parse_double(std::string_view s) {
  const std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) throw FormatError("not a number: " + tmp);
  return v;
}

template <typename Int = long long>
Int parse_int(std::string_view s) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw FormatError("not an integer: " + std::string(s));
  }
  return v;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// "key=value" tokens of a header line after its leading word.
inline std::string header_value(std::string_view line, std::string_view key) {
  for (auto tok : split_ws(line)) {
    if (tok.size() > key.size() && tok.substr(0, key.size()) == key && tok[key.size()] == '=') {
      return std::string(tok.substr(key.size() + 1));
    }
  }
  throw FormatError("header lacks " + std::string(key));
}

// ---------------------------------------------------------------------------
// Instance dumps

template <typename Range, typename Fmt>
std::string join(const Range& r, Fmt fmt) {
  std::string out;
  bool first = true;
  for (const auto& v : r) {
    if (!first) out += ' ';
    out += fmt(v);
    first = false;
  }
  return out;
}

/// Header "nk n=.. k=.. master_seed=.. path=..", then one line per gene:
/// "gene | neighbors | hex-float values".
inline void write_landscape(std::ostream& os, const NkLandscape& l) {
  os << "nk n=" << l.n() << " k=" << l.k() << " master_seed=" << l.provenance().master_seed()
     << " path=" << l.provenance().to_string() << '\n';
  for (int i = 0; i < l.n(); ++i) {
    os << i << " | " << join(l.neighbors(i), [](int v) { return std::to_string(v); }) << " | "
       << join(l.values(i), hex_float) << '\n';
  }
}

inline std::vector<std::string> read_lines(std::istream& is) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(is, line);) {
    if (!trim(line).empty() && trim(line).front() != '#') lines.push_back(line);
  }
  return lines;
}

inline NkLandscape read_landscape(std::istream& is) {
  const auto lines = read_lines(is);
  if (lines.empty() || split_ws(lines[0]).empty() || split_ws(lines[0])[0] != "nk") {
    throw FormatError("expected 'nk' header");
  }
  const int n = parse_int<int>(header_value(lines[0], "n"));
  const int k = parse_int<int>(header_value(lines[0], "k"));
  const SeedPath path = SeedPath::parse(header_value(lines[0], "path"));
  if (lines.size() != static_cast<std::size_t>(n) + 1) throw FormatError("expected one line per gene");
  std::vector<int> neighbors;
  std::vector<double> values;
  for (int i = 0; i < n; ++i) {
    const auto fields = split(lines[static_cast<std::size_t>(i) + 1], '|');
    if (fields.size() != 3) throw FormatError("gene line needs 3 fields");
    if (parse_int<int>(trim(fields[0])) != i) throw FormatError("gene lines out of order");
    for (auto tok : split_ws(fields[1])) neighbors.push_back(parse_int<int>(tok));
    for (auto tok : split_ws(fields[2])) values.push_back(parse_double(tok));
  }
  return NkLandscape::from_tables(n, k, std::move(neighbors), std::move(values), path);
}

/// Header "control mode=.. n=.. d=.. d_count=..", then "gene | partners".
inline void write_control(std::ostream& os, const ControlStructure& c) {
  os << "control mode=" << control_mode_name(c.mode()) << " n=" << c.n() << " d=" << c.d()
     << " d_count=" << c.d_count() << '\n';
  for (int i = 0; i < c.n(); ++i) {
    os << i << " | " << join(c.partners(i), [](int v) { return std::to_string(v); }) << '\n';
  }
}

inline ControlStructure read_control(std::istream& is) {
  const auto lines = read_lines(is);
  if (lines.empty() || split_ws(lines[0]).empty() || split_ws(lines[0])[0] != "control") {
    throw FormatError("expected 'control' header");
  }
  const auto mode = parse_control_mode(header_value(lines[0], "mode"));
  if (!mode) throw FormatError("unknown control mode");
  const int n = parse_int<int>(header_value(lines[0], "n"));
  const int d = parse_int<int>(header_value(lines[0], "d"));
  const int d_count = parse_int<int>(header_value(lines[0], "d_count"));
  if (lines.size() != static_cast<std::size_t>(n) + 1) throw FormatError("expected one line per gene");
  std::vector<std::vector<int>> partners(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto fields = split(lines[static_cast<std::size_t>(i) + 1], '|');
    if (fields.size() != 2) throw FormatError("gene line needs 2 fields");
    if (parse_int<int>(trim(fields[0])) != i) throw FormatError("gene lines out of order");
    for (auto tok : split_ws(fields[1])) partners[static_cast<std::size_t>(i)].push_back(parse_int<int>(tok));
  }
  return {n, *mode, d, d_count, std::move(partners)};
}

/// Header "nkcs n=.. k=.. c=.. s=.. master_seed=.. path=..", then per
/// species a "species a" line and one line per gene:
/// "gene | local | external lists, partners ascending, ';'-separated | values".
inline void write_ecosystem(std::ostream& os, const Ecosystem& eco) {
  os << "nkcs n=" << eco.n() << " k=" << eco.k() << " c=" << eco.c() << " s=" << eco.s()
     << " master_seed=" << eco.provenance().master_seed() << " path=" << eco.provenance().to_string() << '\n';
  auto ints = [](int v) { return std::to_string(v); };
  for (int a = 0; a < eco.species_count(); ++a) {
    os << "species " << a << '\n';
    for (int i = 0; i < eco.n(); ++i) {
      os << i << " | " << join(eco.local_neighbors(a, i), ints) << " |";
      bool first = true;
      for (int b = 0; b < eco.species_count(); ++b) {
        if (b == a) continue;
        os << (first ? " " : " ; ") << join(eco.external_neighbors(a, i, b), ints);
        first = false;
      }
      os << " | " << join(eco.values(a, i), hex_float) << '\n';
    }
  }
}

inline Ecosystem read_ecosystem(std::istream& is) {
  const auto lines = read_lines(is);
  if (lines.empty() || split_ws(lines[0]).empty() || split_ws(lines[0])[0] != "nkcs") {
    throw FormatError("expected 'nkcs' header");
  }
  const int n = parse_int<int>(header_value(lines[0], "n"));
  const int k = parse_int<int>(header_value(lines[0], "k"));
  const int c = parse_int<int>(header_value(lines[0], "c"));
  const int s = parse_int<int>(header_value(lines[0], "s"));
  const SeedPath path = SeedPath::parse(header_value(lines[0], "path"));
  const auto count = static_cast<std::size_t>(s + 1);
  if (lines.size() != 1 + count * (static_cast<std::size_t>(n) + 1)) throw FormatError("unexpected line count");
  std::vector<std::vector<int>> local(count), external(count);
  std::vector<std::vector<double>> values(count);
  std::size_t line = 1;
  for (std::size_t a = 0; a < count; ++a) {
    const auto head = split_ws(lines[line++]);
    if (head.size() != 2 || head[0] != "species" || parse_int<std::size_t>(head[1]) != a) {
      throw FormatError("expected 'species " + std::to_string(a) + "'");
    }
    for (int i = 0; i < n; ++i) {
      const auto fields = split(lines[line++], '|');
      if (fields.size() != 4) throw FormatError("gene line needs 4 fields");
      if (parse_int<int>(trim(fields[0])) != i) throw FormatError("gene lines out of order");
      for (auto tok : split_ws(fields[1])) local[a].push_back(parse_int<int>(tok));
      for (auto part : split(fields[2], ';')) {
        for (auto tok : split_ws(part)) external[a].push_back(parse_int<int>(tok));
      }
      for (auto tok : split_ws(fields[3])) values[a].push_back(parse_double(tok));
    }
  }
  return Ecosystem::from_tables(n, k, c, s, std::move(local), std::move(external), std::move(values), path);
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

inline std::vector<std::string> parse_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline void write_comment_header(std::ostream& os, std::uint64_t master_seed, std::string_view figure_id) {
  os << "# nkd master_seed=" << master_seed << " tool_version=" << kToolVersion << " figure_id=" << figure_id
     << '\n';
}

inline constexpr std::string_view kRunsColumns =
    "figure_id,model,n,k,c,s,d,d_count,control_mode,mutations_per_gen,landscape_idx,start_idx,species,"
    "final_fitness,accepted_count";

inline std::string cell_columns(std::string_view figure_id, const CellParams& c) {
  std::ostringstream os;
  os << csv_field(figure_id) << ',' << model_name(c.model) << ',' << c.n << ',' << c.k << ',' << c.c << ',' << c.s
     << ',' << c.d << ',' << c.d_count << ',' << control_label(c) << ',' << c.mutations;
  return os.str();
}

inline void write_run_row(std::ostream& os, std::string_view figure_id, const RunRecord& r) {
  os << cell_columns(figure_id, r.cell) << ',' << r.landscape_idx << ',' << r.start_idx << ',' << r.species << ','
     << round_trip(r.final_fitness) << ',' << r.accepted_count << '\n';
}

inline void write_runs(std::ostream& os, const ExperimentResult& res) {
  write_comment_header(os, res.spec.master_seed, res.spec.figure_id);
  os << kRunsColumns << '\n';
  for (const auto& r : res.runs) write_run_row(os, res.spec.figure_id, r);
}

inline void write_summary(std::ostream& os, std::uint64_t master_seed, std::string_view figure_id,
                          const std::vector<CellSummary>& summaries) {
  write_comment_header(os, master_seed, figure_id);
  os << "figure_id,model,n,k,c,s,d,d_count,control_mode,mutations_per_gen,species,run_count,mean,std,min,max,"
        "status\n";
  for (const auto& s : summaries) {
    os << cell_columns(figure_id, s.cell) << ',' << s.species << ',' << s.run_count << ','
       << round_trip(s.stats.mean) << ',' << round_trip(s.stats.std) << ',' << round_trip(s.stats.min) << ','
       << round_trip(s.stats.max) << ',' << csv_field(s.status) << '\n';
  }
}

inline std::string ref_label(const CellRef& r) {
  std::string out = cell_key(r.cell);
  if (r.cell.model == Model::nkcs) out += " species=" + std::to_string(r.species);
  return out;
}

inline void write_tests(std::ostream& os, std::uint64_t master_seed, std::string_view figure_id,
                        const std::vector<CellComparison>& tests) {
  write_comment_header(os, master_seed, figure_id);
  os << "cell_a,cell_b,t,df,p,significant\n";
  for (const auto& t : tests) {
    os << csv_field(ref_label(t.a)) << ',' << csv_field(ref_label(t.b)) << ',' << round_trip(t.report.t_statistic)
       << ',' << round_trip(t.report.degrees_of_freedom) << ',' << round_trip(t.report.p_value) << ','
       << (t.report.significant ? 1 : 0) << '\n';
  }
}

/// A runs.csv read back: records plus the header's seed and figure id.
struct RunsTable {
  std::uint64_t master_seed = 0;
  std::string figure_id;
  std::vector<RunRecord> runs;
  std::vector<CellParams> cells;  // first-appearance order
};

inline CellParams cell_from_columns(std::string_view model, std::string_view control, int n, int k, int c, int s,
                                    int d, int d_count, int m) {
  const auto parsed = parse_model(model);
  if (!parsed) throw FormatError("unknown model: " + std::string(model));
  CellParams cell{*parsed, n, k, c, s, d, d_count, m, ControlMode::global};
  if (*parsed == Model::nkd) {
    const auto mode = parse_control_mode(control);
    if (!mode) throw FormatError("unknown control mode: " + std::string(control));
    cell.control = *mode;
  }
  return normalize_cell(cell);
}

inline RunsTable read_runs(std::istream& is) {
  RunsTable table;
  std::vector<std::string> header;
  for (std::string line; std::getline(is, line);) {
    if (trim(line).empty()) continue;
    if (line.front() == '#') {
      try {
        table.master_seed = parse_int<std::uint64_t>(header_value(line, "master_seed"));
        table.figure_id = header_value(line, "figure_id");
      } catch (const FormatError&) {
      }
      continue;
    }
    auto fields = parse_csv_line(line);
    if (header.empty()) {
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size()) throw FormatError("row has wrong column count: " + line);
    auto col = [&](std::string_view name) -> const std::string& {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return fields[i];
      }
      throw FormatError("runs.csv lacks column " + std::string(name));
    };
    auto num = [&](std::string_view name) { return parse_int<int>(col(name)); };
    RunRecord r;
    r.cell = cell_from_columns(col("model"), col("control_mode"), num("n"), num("k"), num("c"), num("s"), num("d"),
                               num("d_count"), num("mutations_per_gen"));
    r.landscape_idx = num("landscape_idx");
    r.start_idx = num("start_idx");
    r.species = num("species");
    r.final_fitness = parse_double(col("final_fitness"));
    r.accepted_count = parse_int<long>(col("accepted_count"));
    if (std::find(table.cells.begin(), table.cells.end(), r.cell) == table.cells.end()) table.cells.push_back(r.cell);
    table.runs.push_back(r);
  }
  if (header.empty()) throw FormatError("runs.csv has no column header");
  return table;
}

}  // namespace nkd::io
