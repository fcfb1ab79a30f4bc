#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "commands.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = nkd::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nkd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string at(const std::string& rel) const { return (dir_ / rel).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerateIsDeterministic) {
  const auto a = cli({"generate", "--model", "nk", "--n", "20", "--k", "4", "--seed", "42", "--out", at("a.txt")});
  const auto b = cli({"generate", "--model", "nk", "--n", "20", "--k", "4", "--seed", "42", "--out", at("b.txt")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(slurp(at("a.txt")), slurp(at("b.txt")));
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("seed_path=42/", 0), 0u);
  EXPECT_NE(a.err.find("master_seed=42"), std::string::npos);
  const auto c = cli({"generate", "--model", "nk", "--n", "20", "--k", "4", "--seed", "43", "--out", at("c.txt")});
  EXPECT_NE(slurp(at("a.txt")), slurp(at("c.txt")));
}

TEST_F(Cli, GenerateSmallEcosystem) {
  const auto r = cli({"generate", "--model", "nkcs", "--n", "3", "--k", "1", "--c", "1", "--s", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  int gene_lines = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.find('|') == std::string::npos) continue;
    ++gene_lines;
    const auto values = line.substr(line.rfind('|') + 1);
    std::istringstream vs(values);
    int count = 0;
    for (std::string v; vs >> v;) ++count;
    EXPECT_EQ(count, 8);
  }
  EXPECT_EQ(gene_lines, 6);
}

TEST_F(Cli, GenerateRejectsLargeK) {
  const auto r = cli({"generate", "--n", "20", "--k", "30"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("k must be < n"), std::string::npos);
}

TEST_F(Cli, RunPrintsFitnessAndAppendsRow) {
  const std::vector<std::string> args{"run", "--model", "nkd", "--n", "20", "--k", "4", "--d", "12",
                                      "--generations", "5000", "--seed", "7", "--csv", at("runs.csv")};
  const auto a = cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(a.out.size(), std::string("0.000000\n").size());
  const auto b = cli(args);
  EXPECT_EQ(a.out, b.out);
  std::ifstream in(at("runs.csv"));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0].rfind("# nkd master_seed=7", 0), 0u);
  EXPECT_EQ(lines[2], lines[3]);
}

TEST_F(Cli, RunMatchesFigureRow) {
  // A single run reproduces the matching row of a sweep with the same seed.
  const auto fig = cli({"figure", "fig6", "--seed", "3", "--landscapes", "1", "--starts", "2", "--generations", "200",
                        "--out", at("fig"), "--workers", "2"});
  ASSERT_EQ(fig.code, 0) << fig.err;
  const auto run = cli({"run", "--model", "nkd", "--n", "20", "--k", "8", "--d", "4", "--generations", "200",
                        "--seed", "3", "--start-index", "1", "--csv", ""});
  ASSERT_EQ(run.code, 0) << run.err;
  const auto table = slurp(at("fig/runs.csv"));
  std::istringstream in(table);
  bool found = false;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("fig6,nkd,20,8,0,0,4,20,random_d,1,0,1,0,", 0) == 0) {
      const auto fields = line.substr(std::string("fig6,nkd,20,8,0,0,4,20,random_d,1,0,1,0,").size());
      const double v = std::stod(fields.substr(0, fields.find(',')));
      std::ostringstream six;
      six.setf(std::ios::fixed);
      six.precision(6);
      six << v << '\n';
      EXPECT_EQ(six.str(), run.out);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST_F(Cli, RunWithZeroGenerations) {
  const auto r = cli({"run", "--n", "20", "--k", "4", "--generations", "0", "--csv", ""});
  ASSERT_EQ(r.code, 0) << r.err;
  const double v = std::stod(r.out);
  EXPECT_GT(v, 0.2);
  EXPECT_LT(v, 0.8);
  EXPECT_NE(r.err.find("master_seed=0"), std::string::npos);
}

TEST_F(Cli, RunConfigFileWithFlagOverride) {
  {
    std::ofstream cfg(at("cfg.json"));
    cfg << R"({"model": "nkd", "n": 20, "k": 4, "d": 12, "generations": 300, "seed": 7, "csv": ""})";
  }
  const auto file = cli({"run", "--config", at("cfg.json")});
  const auto flags = cli({"run", "--model", "nkd", "--n", "20", "--k", "4", "--d", "12", "--generations", "300",
                          "--seed", "7", "--csv", ""});
  ASSERT_EQ(file.code, 0) << file.err;
  EXPECT_EQ(file.out, flags.out);
  const auto over = cli({"run", "--config", at("cfg.json"), "--d", "2"});
  const auto direct = cli({"run", "--model", "nkd", "--n", "20", "--k", "4", "--d", "2", "--generations", "300",
                           "--seed", "7", "--csv", ""});
  EXPECT_EQ(over.out, direct.out);
  EXPECT_EQ(cli({"run", "--config", at("absent.json")}).code, 3);
}

TEST_F(Cli, FigureWritesAllOutputs) {
  const auto r = cli({"figure", "fig2", "--seed", "1", "--landscapes", "2", "--starts", "2", "--generations", "100",
                      "--out", at("fig2")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"runs.csv", "summary.csv", "tests.csv", "manifest.json", "plotdata/nk_n20.tsv",
                        "plotdata/nk_n100.tsv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "fig2" / f)) << f;
  }
  std::ifstream in(at("fig2/summary.csv"));
  int rows = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  EXPECT_EQ(rows, 1 + 14);
  EXPECT_EQ(slurp(at("fig2/summary.csv")).rfind("# nkd master_seed=1 tool_version=", 0), 0u);
  EXPECT_FALSE(fs::exists(dir_ / "fig2.partial"));
}

TEST_F(Cli, FigureRefusesToOverwrite) {
  const std::vector<std::string> args{"figure", "fig9", "--landscapes", "1", "--starts", "2", "--generations", "20",
                                      "--out", at("o")};
  ASSERT_EQ(cli(args).code, 0);
  EXPECT_EQ(cli(args).code, 2);
  auto forced = args;
  forced.push_back("--force");
  EXPECT_EQ(cli(forced).code, 0);
}

TEST_F(Cli, FigureOutputIndependentOfWorkers) {
  auto args = std::vector<std::string>{"figure", "fig8", "--seed", "5", "--landscapes", "2", "--starts", "2",
                                       "--generations", "150", "--workers", "1", "--out", at("w1")};
  ASSERT_EQ(cli(args).code, 0);
  args[11] = "8";
  args[13] = at("w8");
  ASSERT_EQ(cli(args).code, 0);
  for (const auto& e : fs::recursive_directory_iterator(dir_ / "w1")) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    const auto rel = fs::relative(e.path(), dir_ / "w1");
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "w8" / rel)) << rel;
  }
}

TEST_F(Cli, UnknownFigureIsUsageError) {
  const auto r = cli({"figure", "fig99", "--out", at("x")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("fig99"), std::string::npos);
}

TEST_F(Cli, SweepCompareAndStats) {
  {
    std::ofstream spec(at("spec.json"));
    spec << R"({"figure_id": "mini", "model": "nkd", "grid": {"n": [20], "k": [4], "d": [2, 12, 19]},
               "landscapes_per_cell": 2, "starts_per_landscape": 3, "generations": 200, "master_seed": 11})";
  }
  const auto sw = cli({"sweep", at("spec.json"), "--out", at("mini")});
  ASSERT_EQ(sw.code, 0) << sw.err;
  EXPECT_NE(sw.err.find("master_seed=11"), std::string::npos);
  const std::string runs = at("mini/runs.csv");

  const auto self = cli({"compare", "--runs", runs, "--a", "n=20,k=4,d=12", "--b", "n=20,k=4,d=12"});
  ASSERT_EQ(self.code, 0) << self.err;
  EXPECT_NE(self.out.find(",0,10,1,0\n"), std::string::npos) << self.out;

  const auto pair = cli({"compare", "--runs", runs, "--a", "d=12", "--b", "d=19", "--out", at("t.csv")});
  ASSERT_EQ(pair.code, 0) << pair.err;
  EXPECT_TRUE(fs::exists(at("t.csv")));

  const auto missing = cli({"compare", "--runs", runs, "--a", "d=12", "--b", "d=7"});
  EXPECT_EQ(missing.code, 3);
  EXPECT_NE(missing.err.find("d=7"), std::string::npos);
  EXPECT_EQ(cli({"compare", "--runs", runs, "--a", "k=4", "--b", "d=7"}).code, 2);
  EXPECT_EQ(cli({"compare", "--runs", at("none.csv"), "--a", "d=1", "--b", "d=2"}).code, 3);

  const auto stats = cli({"stats", "--runs", runs});
  ASSERT_EQ(stats.code, 0) << stats.err;
  EXPECT_EQ(stats.out, slurp(at("mini/summary.csv")));

  const auto seeded = cli({"sweep", at("spec.json"), "--out", at("mini2"), "--seed", "12"});
  ASSERT_EQ(seeded.code, 0);
  EXPECT_EQ(slurp(at("mini2/runs.csv")).rfind("# nkd master_seed=12", 0), 0u);
}

TEST_F(Cli, BadSpecIsUsageError) {
  {
    std::ofstream spec(at("bad.json"));
    spec << R"({"model": "nkd", "grid": {"n": [20], "q": [1]}})";
  }
  EXPECT_EQ(cli({"sweep", at("bad.json"), "--out", at("b")}).code, 2);
}

TEST_F(Cli, BinaryExitCodes) {
  const std::string bin = NKD_BINARY;
  auto code = [](const std::string& cmd) {
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  EXPECT_EQ(code(bin + " generate --n 20 --k 30"), 2);
  EXPECT_EQ(code(bin + " --bogus"), 2);
  EXPECT_EQ(code(bin), 2);
  EXPECT_EQ(code(bin + " --help"), 0);
  EXPECT_EQ(code(bin + " compare --runs " + at("none.csv") + " --a d=1 --b d=2"), 3);
  EXPECT_EQ(code(bin + " run --n 12 --k 2 --generations 10 --csv ''"), 0);
}
