#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gchlab/experiments.hpp"

using namespace gchlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("gchlab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json report_of(const fs::path& dir) { return Json::parse(slurp(dir / "report.json")); }

}  // namespace

TEST(Csv, MonitorHeaderIsExact) {
  CsvTable t;
  t.header = monitor_header();
  EXPECT_EQ(t.str(), "t,E,w_linf,w_bound,ux_linf,ux_bound,B,min_uxx,xi\n");
  EXPECT_THROW(t.add({"1"}), ConfigError);
}

TEST(Csv, DoublesAreFixedFormat) {
  EXPECT_EQ(format_double(0.1), "1.000000000000e-01");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_TRUE(json_number(std::nan("")).is_null());
}

TEST(Svg, HasNoTimestampByDefault) {
  const std::vector<PlotPanel> panels{{"p", "t", false, {PlotSeries{"a", {0, 1, 2}, {1, std::nan(""), 3}}}}};
  const auto svg = render_svg(panels);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(svg.find("generated"), std::string::npos);
  EXPECT_EQ(svg, render_svg(panels));
  EXPECT_NE(render_svg(panels, true).find("generated"), std::string::npos);
}

TEST(Experiments, ZeroDataGivesAFlatSeries) {
  const auto dir = scratch("zero");
  auto cfg = parse_config("kind = \"simulate\"\nT = 0.5\n[grid]\nN = 256\n[initial]\nprofile = \"zero\"\n");
  ASSERT_EQ(run_experiment(cfg, dir), 0);
  std::istringstream csv(slurp(dir / "series.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "t,E,w_linf,w_bound,ux_linf,ux_bound,B,min_uxx,xi");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');  // t
    for (int col = 1; col < 8; ++col) {  // xi, the last column, is a location
      std::getline(cells, cell, ',');
      EXPECT_EQ(std::stod(cell), 0.0) << line;
    }
  }
  EXPECT_GT(rows, 1);
  const auto rep = report_of(dir);
  EXPECT_EQ(rep["status"], "pass");
  EXPECT_EQ(rep["summary"]["run"]["stop_reason"], "reached_T_end");
  EXPECT_TRUE(fs::exists(dir / "plot.svg"));
  EXPECT_EQ(parse_config(slurp(dir / "config.echo")), cfg);
}

TEST(Experiments, PeakonVerifyWritesAResidualTable) {
  const auto dir = scratch("verify");
  auto cfg = parse_config("kind = \"peakon-verify\"\n");
  ASSERT_EQ(run_experiment(cfg, dir), 0);
  const auto rep = report_of(dir);
  EXPECT_EQ(rep["summary"]["residual_table"].size(), 5u);
  EXPECT_GE(rep["summary"]["fitted_order"].get<double>(), 1.5);
  EXPECT_EQ(slurp(dir / "series.csv").substr(0, 24), "level,nx,nt,h,residual\n0");
}

TEST(Experiments, SubThresholdBlowupMakesNoClaim) {
  const auto dir = scratch("subthreshold");
  auto cfg = parse_config(
      "kind = \"blowup-study\"\nT = 2\n[grid]\nL = 10\nN = 2048\n"
      "[blowup]\namplitudes = \"0.2\"\nwidth = 0.25\n");
  ASSERT_EQ(run_experiment(cfg, dir), 0);
  const auto rep = report_of(dir);
  const auto& item = rep["summary"]["items"][0];
  EXPECT_FALSE(item["setup"]["verdict"].get<bool>());
  EXPECT_TRUE(item["setup"]["bound_time"].is_null());
  for (const auto& c : rep["hard_assertions"])
    EXPECT_EQ(c["name"].get<std::string>().find("T_est"), std::string::npos);
  const auto csv = slurp(dir / "series.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "A,C_T,verdict,T_est,bound,window_mean");
  EXPECT_NE(csv.find(",false,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "item_000" / "series.csv"));
}

TEST(Experiments, ErrorsProduceAnErrorRecord) {
  const auto dir = scratch("error");
  // A bump this wide does not decay inside [-5, 5).
  auto cfg = parse_config(
      "kind = \"simulate\"\n[grid]\nL = 5\nN = 256\n[initial]\nprofile = \"gaussian\"\nwidth = 3\n");
  EXPECT_EQ(run_experiment(cfg, dir), 2);
  const auto rep = report_of(dir);
  EXPECT_EQ(rep["status"], "error");
  EXPECT_EQ(rep["error_type"], "config_error");
  EXPECT_FALSE(rep["message"].get<std::string>().empty());

  const auto dir2 = scratch("invalid");
  EXPECT_EQ(run_experiment(parse_config("kind = \"simulate\"\n[grid]\nN = 100\n"), dir2), 2);
  EXPECT_NE(report_of(dir2)["message"].get<std::string>().find("grid.N"), std::string::npos);
}

TEST(Experiments, SnapshotsHaveASidecar) {
  const auto dir = scratch("snapshots");
  auto cfg = parse_config(
      "kind = \"simulate\"\nT = 0.3\n[grid]\nN = 256\n[solver]\nsnapshot_interval = 0.1\nwrite_snapshots = true\n"
      "[initial]\nprofile = \"gaussian\"\namplitude = 0.2\n");
  ASSERT_EQ(run_experiment(cfg, dir), 0);
  const auto side = Json::parse(slurp(dir / "snapshots.json"));
  EXPECT_EQ(side["version"], 1);
  EXPECT_EQ(side["field"], "u");
  EXPECT_EQ(side["grid"]["N"], 256);
  EXPECT_EQ(side["grid"]["L"], 40.0);
  ASSERT_EQ(side["times"].size(), 4u);
  EXPECT_EQ(fs::file_size(dir / "snapshots.bin"), 4u * 256u * sizeof(double));
}

TEST(Experiments, OutputIsDeterministic) {
  const std::string text =
      "kind = \"besov-audit\"\nseed = 11\n[grid]\nL = 3.141592653589793\nN = 256\n[audit]\ncount = 20\nmax_mode = 16\n";
  const auto cfg = parse_config(text);
  const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  ASSERT_EQ(run_experiment(cfg, a, 1), 0);
  ASSERT_EQ(run_experiment(cfg, b, 1), 0);
  ASSERT_EQ(run_experiment(cfg, c, 4), 0);
  for (const char* f : {"report.json", "series.csv", "plot.svg"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(c / f)) << f;
  }
  auto other = cfg;
  other.set("seed", std::int64_t{12});
  const auto d = scratch("det_d");
  ASSERT_EQ(run_experiment(other, d, 1), 0);
  EXPECT_NE(slurp(a / "series.csv"), slurp(d / "series.csv"));
}

TEST(Experiments, ParallelForPropagatesExceptions) {
  std::vector<int> hit(50, 0);
  parallel_for(50, 4, [&](std::size_t i) { hit[i] = 1; });
  EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 50);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw ConfigError("boom");
               }),
               ConfigError);
}
