#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "onebit/harness.hpp"

using namespace onebit;
namespace fs = std::filesystem;

namespace {

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.n = 64;
  cfg.s = 3;
  cfg.m_grid = {128, 256, 512};
  cfg.algorithms = {Algorithm::nbiht, Algorithm::one_shot, Algorithm::biht, Algorithm::iht};
  cfg.trials_per_cell = 3;
  cfg.max_iters = 40;
  cfg.master_seed = 99;
  cfg.workers = 1;
  return cfg;
}

std::vector<SweepRecord> power_law(double scale, double slope) {
  std::vector<SweepRecord> recs;
  for (Index m : {256, 512, 1024, 2048, 4096}) {
    for (int t = 0; t < 3; ++t) {
      SweepRecord r;
      r.algorithm = "nbiht";
      r.m = m;
      r.trial_index = t;
      r.final_l2_error = scale * std::pow(static_cast<double>(m), slope);
      recs.push_back(r);
    }
  }
  return recs;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("onebit_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Sweep, Cardinality) {
  auto cfg = small_config();
  cfg.m_grid = {256, 512};
  cfg.algorithms = {Algorithm::nbiht};
  cfg.trials_per_cell = 2;
  EXPECT_EQ(run_sweep(cfg).records.size(), 4u);
}

TEST(Sweep, SortedAndBounded) {
  const auto res = run_sweep(small_config());
  ASSERT_EQ(res.records.size(), 4u * 3u * 3u);
  for (std::size_t i = 1; i < res.records.size(); ++i) {
    const auto& a = res.records[i - 1];
    const auto& b = res.records[i];
    EXPECT_TRUE(std::tie(a.algorithm, a.m, a.trial_index) < std::tie(b.algorithm, b.m, b.trial_index));
  }
  for (const auto& r : res.records) {
    EXPECT_GE(r.final_l2_error, 0.0);
    EXPECT_LE(r.final_l2_error, 2.0);
    EXPECT_EQ(r.n, 64);
    EXPECT_EQ(r.s, 3);
  }
}

TEST(Sweep, OrderIndependentAcrossWorkerCounts) {
  auto cfg = small_config();
  const auto one = run_sweep(cfg);
  cfg.workers = 4;
  const auto four = run_sweep(cfg);
  ASSERT_EQ(one.records.size(), four.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i)
    EXPECT_TRUE(same_outcome(one.records[i], four.records[i])) << i;
}

TEST(Sweep, PairedInstancesAcrossAlgorithms) {
  // The same cell seeds feed every algorithm.
  auto cfg = small_config();
  const auto res = run_sweep(cfg);
  const auto seeds = cell_seeds(cfg.master_seed, 1, 256, cfg.trials_per_cell, 2);
  for (const auto alg : cfg.algorithms) {
    const auto direct = run_instance(alg, cfg, seeds);
    const auto it = std::find_if(res.records.begin(), res.records.end(), [&](const SweepRecord& r) {
      return r.algorithm == to_string(alg) && r.m == 256 && r.trial_index == 2;
    });
    ASSERT_NE(it, res.records.end());
    EXPECT_TRUE(same_outcome(*it, direct)) << to_string(alg);
  }
}

TEST(Sweep, ErrorsAreCapturedNotThrown) {
  auto cfg = small_config();
  cfg.algorithms = {Algorithm::nbiht};
  cfg.degenerate_policy = DegeneratePolicy::fail;
  cfg.step_size = 1e6;  // wild step; any failure lands in stop_reason
  EXPECT_NO_THROW(run_sweep(cfg));
}

TEST(Sweep, NbihtImprovesWithM) {
  SweepConfig cfg;
  cfg.m_grid = {256, 8192};
  cfg.algorithms = {Algorithm::nbiht};
  cfg.trials_per_cell = 50;
  cfg.master_seed = 5;
  cfg.workers = 1;
  const auto med = error_by_m(run_sweep(cfg).records, "nbiht", ErrorStat::median);
  EXPECT_LT(med.at(8192), med.at(256));
}

TEST(Sweep, ConfigValidation) {
  auto cfg = small_config();
  cfg.m_grid = {256, 256};
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = small_config();
  cfg.trials_per_cell = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = small_config();
  cfg.s = 100;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = small_config();
  cfg.noise_std = -0.1;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(SeedHygiene, DistinctFirstDrawsAcrossTenThousandCells) {
  std::set<std::uint64_t> first_draws;
  std::set<std::uint64_t> substreams;
  const Index trials = 100;
  for (std::size_t pos = 0; pos < 100; ++pos) {
    for (Index t = 0; t < trials; ++t) {
      const auto c = cell_seeds(2024, pos, 100 + static_cast<Index>(pos), trials, t);
      RngStream r(c.cell);
      first_draws.insert(r.next_u64());
      for (auto sub : {c.signal, c.matrix, c.init, c.noise}) substreams.insert(sub);
    }
  }
  EXPECT_EQ(first_draws.size(), 10000u);
  EXPECT_EQ(substreams.size(), 40000u);
}

TEST(FitSlope, PlantedSlopes) {
  auto fit = fit_slope(power_law(10.0, -1.0), "nbiht");
  EXPECT_NEAR(fit.slope, -1.0, 1e-9);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-9);
  EXPECT_NEAR(fit.intercept, std::log(10.0), 1e-9);
  fit = fit_slope(power_law(3.0, -0.5), "nbiht", ErrorStat::mean);
  EXPECT_NEAR(fit.slope, -0.5, 1e-9);
  for (double slope : {-2.3, -0.77, 0.4}) EXPECT_NEAR(fit_slope(power_law(0.7, slope), "nbiht").slope, slope, 1e-9);
}

TEST(FitSlope, NeedsThreeMValues) {
  auto recs = power_law(1.0, -1.0);
  recs.erase(std::remove_if(recs.begin(), recs.end(), [](const SweepRecord& r) { return r.m > 512; }),
             recs.end());
  EXPECT_THROW(fit_slope(recs, "nbiht"), InvalidArgument);
  EXPECT_THROW(fit_slope(power_law(1.0, -1.0), "biht"), InvalidArgument);
}

TEST(Csv, HeaderAndRoundTrip) {
  const auto res = run_sweep(small_config());
  const std::string csv = records_to_csv(res.records);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), std::string(kCsvHeader));
  const auto back = records_from_csv(csv);
  ASSERT_EQ(back.size(), res.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    const auto& a = res.records[i];
    const auto& b = back[i];
    EXPECT_EQ(a.algorithm, b.algorithm);
    EXPECT_EQ(a.m, b.m);
    EXPECT_EQ(a.n, b.n);
    EXPECT_EQ(a.s, b.s);
    EXPECT_EQ(a.trial_index, b.trial_index);
    EXPECT_EQ(a.iterations_used, b.iterations_used);
    EXPECT_EQ(a.stop_reason, b.stop_reason);
    EXPECT_NEAR(a.final_l2_error, b.final_l2_error, 1e-12);
    EXPECT_NEAR(a.sign_agreement, b.sign_agreement, 1e-12);
    EXPECT_NEAR(a.wall_time_ms, b.wall_time_ms, 1e-12);
  }
}

TEST(Csv, EmptyIsHeaderOnly) {
  EXPECT_EQ(records_to_csv({}), std::string(kCsvHeader) + "\n");
  EXPECT_TRUE(records_from_csv(records_to_csv({})).empty());
  EXPECT_THROW(records_from_csv("bogus,header\n"), InvalidArgument);
}

TEST(Csv, QuotesAwkwardStopReasons) {
  SweepRecord r;
  r.algorithm = "nbiht";
  r.stop_reason = "error:bad, \"thing\"";
  r.final_l2_error = std::nan("");
  const auto back = records_from_csv(records_to_csv({r}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].stop_reason, r.stop_reason);
  EXPECT_TRUE(std::isnan(back[0].final_l2_error));
}

TEST(Manifest, KeysRoundTripIntoConfig) {
  auto cfg = small_config();
  cfg.noise_std = 0.25;
  cfg.value_rule = ValueRule::rademacher;
  cfg.init = InitKind::matched_filter;
  cfg.constants.c_big_b = 1.5;
  SweepConfig back;
  apply_sweep_keys(sweep_keys(cfg), back);
  EXPECT_EQ(sweep_keys(back), sweep_keys(cfg));
  EXPECT_THROW(apply_sweep_keys({{"no-such-key", "1"}}, back), InvalidArgument);
}

TEST(Manifest, ContainsReproductionMetadata) {
  const auto res = run_sweep(small_config());
  const auto doc = manifest_to_ini(res.manifest);
  EXPECT_EQ(doc.section("manifest").at("rng_algorithm"), std::string(RngStream::algorithm_name));
  EXPECT_EQ(doc.section("manifest").at("library_version"), std::string(kLibraryVersion));
  EXPECT_TRUE(doc.section("sweep").count("constants-c10"));
  EXPECT_EQ(doc.section("seeds").size(), 9u);
}

TEST(Manifest, RerunReproducesBitwise) {
  const auto cfg = small_config();
  const auto first = run_sweep(cfg);
  const auto doc = IniDocument::parse(manifest_to_text(first.manifest));
  for (int workers : {1, 3}) {
    SweepConfig again;
    apply_sweep_keys(doc.section("sweep"), again);
    again.workers = workers;
    const auto second = run_sweep(again);
    ASSERT_EQ(first.records.size(), second.records.size());
    for (std::size_t i = 0; i < first.records.size(); ++i)
      EXPECT_TRUE(same_outcome(first.records[i], second.records[i])) << i;
  }
}

TEST(Report, FilesAndSeriesCount) {
  const auto res = run_sweep(small_config());
  const auto dir = scratch_dir("report");
  const auto paths = emit_report(res.records, res.manifest, dir);
  EXPECT_TRUE(fs::exists(paths.csv));
  EXPECT_TRUE(fs::exists(paths.manifest));
  ASSERT_TRUE(fs::exists(paths.plot));
  const std::string svg = slurp(paths.plot);
  const std::regex series("<polyline class=\"series\"");
  const auto n = std::distance(std::sregex_iterator(svg.begin(), svg.end(), series), std::sregex_iterator());
  EXPECT_EQ(n, 4);
  EXPECT_NE(svg.find("class=\"slope\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"theory\""), std::string::npos);
  EXPECT_EQ(records_from_csv(slurp(paths.csv)).size(), res.records.size());
  fs::remove_all(dir);
}

TEST(Report, EmptyRecordsNoPlot) {
  const auto dir = scratch_dir("empty");
  const auto paths = emit_report({}, RunManifest{}, dir);
  EXPECT_TRUE(paths.plot.empty());
  EXPECT_EQ(slurp(paths.csv), std::string(kCsvHeader) + "\n");
  fs::remove_all(dir);
}

TEST(Report, UnwritableDirectoryNamesPath) {
  try {
    emit_report({}, RunManifest{}, "/proc/onebit_cannot_write_here");
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("/proc/onebit_cannot_write_here"), std::string::npos);
  }
}
