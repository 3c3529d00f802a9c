#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "windsim/windsim.hpp"

using namespace windsim;

namespace {

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Relative path -> contents for every regular file below `root`.
std::map<std::string, std::string> tree(const fs::path &root) {
  std::map<std::string, std::string> out;
  for (const auto &e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file())
      out[fs::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

class PipelineTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("windsim_pipe_" + std::string(::testing::UnitTest::GetInstance()
                                              ->current_test_info()
                                              ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // 3x3 grid, constant westerly wind of `w10` / `w50` m/s for two days.
  void constant_scenario(double w10, double w50) {
    GridGeometry g{-6.0, -38.0, 0.5, 0.5, 3, 3};
    const std::size_t nt = 48;
    WindGrid::Components c;
    c.u10.assign(g.size() * nt, w10);
    c.v10.assign(g.size() * nt, 0.0);
    c.u50.assign(g.size() * nt, w50);
    c.v50.assign(g.size() * nt, 0.0);
    io::write_wind_grid(dir_ / "grid.csv", WindGrid(g, Hour{make_day(2017, 1, 1)}, nt,
                                                    std::move(c),
                                                    std::vector<double>(g.size(), 0.0)));
    WindPark p;
    p.park_id = "P1";
    p.name = "one";
    p.location = GridPoint(-5.7, -37.6);
    p.state = "CE";
    p.installed_capacity_mw = 10.0;
    p.n_turbines = 5;
    p.turbine.capacity_kw = 2000;
    p.turbine.rotor_diameter_m = 100;
    p.turbine.hub_height_m = 80;
    p.commissioning_date = make_day(2010, 1, 1);
    io::write_parks(dir_ / "parks.csv", std::vector<WindPark>{p});
    GridGeometry r{-6.0, -38.0, 0.05, 0.05, 21, 21};
    io::write_raster(dir_ / "raster.csv",
                     MeanWindRaster(r, std::vector<double>(r.size(), w50)));
  }

  RunConfig config(const std::string &extra) {
    std::ofstream(dir_ / "run.conf") << "input.grid = grid.csv\n"
                                        "input.parks = parks.csv\n"
                                        "input.raster = raster.csv\n"
                                        "output.dir = out\n"
                                     << extra;
    return load_run_config(dir_ / "run.conf");
  }

  fs::path dir_;
};

} // namespace

TEST_F(PipelineTest, RatedPlateauEndToEnd) {
  constant_scenario(15.0, 15.0);
  const auto r = run_simulate(config(""));
  ASSERT_EQ(r.size(), 1u);
  const auto &park = r[0].parks.at("P1");
  ASSERT_EQ(park.size(), 2u);
  for (double v : park.values)
    EXPECT_NEAR(v, 10.0 * 24 / 1000, 1e-12);
  EXPECT_NEAR(r[0].country.at("Brazil").values[1], 0.24, 1e-12);
  const auto text = slurp(dir_ / "out/simulate/nn_none/park.csv");
  EXPECT_EQ(text, "region,date,generation_gwh\nP1,2017-01-01,0.24\nP1,2017-01-02,0.24\n");
}

TEST_F(PipelineTest, MeanGwaWithMatchingRasterIsPassThrough) {
  constant_scenario(6.0, 7.5);
  run_simulate(config("biascorr.method = none, mean_gwa\n"));
  const auto a = slurp(dir_ / "out/simulate/nn_none/park.csv");
  EXPECT_EQ(a, slurp(dir_ / "out/simulate/nn_mean_gwa/park.csv"));
  EXPECT_NE(a.find("P1,2017-01-02"), std::string::npos);
}

TEST_F(PipelineTest, ValidateIdentityAndMissingRegion) {
  constant_scenario(6.0, 7.5);
  run_simulate(config(""));
  // observed = simulated state and country series; park P1 unobserved
  auto obs = io::read_generation(dir_ / "out/simulate/nn_none/state.csv");
  for (auto &[k, v] : io::read_generation(dir_ / "out/simulate/nn_none/country.csv"))
    obs.emplace(k, v);
  obs.emplace("RS", obs.at("CE"));
  io::write_generation(dir_ / "obs.csv", obs);

  Pipeline p(config("input.observed = obs.csv\n"));
  const auto rows = p.validate();
  ASSERT_EQ(rows.size(), 2u);
  for (const auto &r : rows) {
    EXPECT_EQ(r.rmse, 0.0);
    EXPECT_EQ(r.mbe, 0.0);
  }
  const auto log = slurp(dir_ / "out/validate.log");
  EXPECT_NE(log.find("P1"), std::string::npos);
  EXPECT_NE(log.find("RS"), std::string::npos);
}

TEST_F(PipelineTest, IngestErrorsNameFileAndLine) {
  constant_scenario(6.0, 7.5);
  auto text = slurp(dir_ / "parks.csv");
  text += "P2,two,-5.5,-37.5,CE,NorthEast,abc,,,,,2012-01-01\n";
  std::ofstream(dir_ / "parks.csv") << text;
  try {
    run_simulate(config(""));
    FAIL() << "expected IngestError";
  } catch (const IngestError &e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("parks.csv"), std::string::npos);
  }
}

TEST_F(PipelineTest, OutOfDomainParkIsExcludedPerMethod) {
  constant_scenario(6.0, 7.5);
  // P1 sits in the corner cell: no full bicubic neighbourhood on a 3x3 grid
  const auto r = run_simulate(config("interpolation.method = bli, bci\n"));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].count(ParkStatus::excluded), 0u);
  EXPECT_EQ(r[1].count(ParkStatus::excluded), 1u);
  EXPECT_TRUE(r[1].parks.empty());
  EXPECT_NE(slurp(dir_ / "out/manifest.txt").find("park P1 = excluded"), std::string::npos);

  // with zero tolerance the exclusion is a degradation
  EXPECT_THROW(run_simulate(config("interpolation.method = bci\n"
                                   "pipeline.max_fallback_fraction = 0\n")),
               DegradationError);
}

class SyntheticPipelineTest : public PipelineTest {
protected:
  // One-year bundle; too short for any station to qualify.
  SyntheticBundle small(double bias, std::uint64_t seed = 5) {
    RunConfig::Synthetic s;
    s.seed = seed;
    s.bias = bias;
    s.years = 1;
    s.start_year = 2016;
    s.n_parks = 8;
    return run_synthetic(s, dir_ / "bundle");
  }
};

TEST_F(SyntheticPipelineTest, SameSeedSameBundle) {
  small(0.2, 11);
  const auto a = tree(dir_ / "bundle");
  fs::remove_all(dir_ / "bundle");
  small(0.2, 11);
  EXPECT_EQ(a, tree(dir_ / "bundle"));
  fs::remove_all(dir_ / "bundle");
  small(0.2, 12);
  EXPECT_NE(a.at("grid.csv"), tree(dir_ / "bundle").at("grid.csv"));
}

TEST_F(SyntheticPipelineTest, NullScenarioMatchesTruth) {
  const auto b = small(0.0);
  auto cfg = load_run_config(b.config);
  apply_method_override(cfg, "bli:none");
  const auto reports = run_full(cfg);
  bool saw_country = false;
  for (const auto &r : reports) {
    if (r.region != "Brazil")
      continue;
    saw_country = true;
    EXPECT_GT(*r.correlation, 0.999);
    EXPECT_LT(std::abs(*r.rel_mbe), 0.01);
  }
  EXPECT_TRUE(saw_country);
}

TEST_F(SyntheticPipelineTest, MultiMethodRowsMatchSingleRuns) {
  const auto b = small(0.2);
  auto cfg = load_run_config(b.config);
  cfg.corrections = {CorrectionMethod::none, CorrectionMethod::mean_gwa};
  cfg.interpolations = {Interpolation::nearest, Interpolation::bilinear,
                        Interpolation::idw};
  cfg.input.stations.clear();
  cfg.input.measurements.clear();
  const auto all = run_full(cfg);
  for (auto i : cfg.interpolations) {
    auto one = cfg;
    one.interpolations = {i};
    one.out_dir = dir_ / ("single_" + std::string(to_string(i)));
    const auto rows = run_full(one);
    for (const auto &r : rows) {
      const auto it = std::find_if(all.begin(), all.end(), [&](const MetricReport &a) {
        return a.region == r.region && a.method == r.method;
      });
      ASSERT_NE(it, all.end()) << r.region << " " << r.method;
      EXPECT_EQ(it->rmse, r.rmse);
      EXPECT_EQ(it->mbe, r.mbe);
      EXPECT_EQ(it->correlation, r.correlation);
      EXPECT_EQ(it->rel_mbe, r.rel_mbe);
    }
    std::size_t n = 0;
    for (const auto &a : all)
      n += a.method.starts_with(std::string(to_string(i)) + ":");
    EXPECT_EQ(n, rows.size());
  }
}

TEST_F(SyntheticPipelineTest, StagesComposeLikeFusedRun) {
  const auto b = small(0.2);
  auto cfg = load_run_config(b.config);
  cfg.corrections = {CorrectionMethod::none, CorrectionMethod::mean_gwa};
  cfg.input.stations.clear();
  cfg.input.measurements.clear();
  run_full(cfg);
  const auto fused = tree(cfg.out_dir);

  auto staged = cfg;
  staged.out_dir = dir_ / "staged";
  run_simulate(staged);
  run_validate(staged);
  EXPECT_EQ(fused, tree(staged.out_dir));
}

TEST_F(SyntheticPipelineTest, OutputsRoundTripThroughParsers) {
  const auto b = small(0.2);
  auto cfg = load_run_config(b.config);
  cfg.corrections = {CorrectionMethod::none};
  cfg.input.stations.clear();
  cfg.input.measurements.clear();
  run_full(cfg);
  const fs::path sim = cfg.out_dir / "simulate" / "nn_none";
  for (const char *f : {"park.csv", "state.csv", "subsystem.csv", "country.csv"}) {
    io::write_generation(dir_ / "again.csv", io::read_generation(sim / f));
    EXPECT_EQ(slurp(sim / f), slurp(dir_ / "again.csv")) << f;
  }
  io::write_capacity(dir_ / "again.csv", io::read_capacity(sim / "capacity.csv"));
  EXPECT_EQ(slurp(sim / "capacity.csv"), slurp(dir_ / "again.csv"));
  io::write_reports(dir_ / "again.csv", io::read_reports(cfg.out_dir / "validation.csv"));
  EXPECT_EQ(slurp(cfg.out_dir / "validation.csv"), slurp(dir_ / "again.csv"));
}

// Four years so that stations qualify.
class SweepTest : public PipelineTest {
protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "windsim_sweep_bundle";
    fs::remove_all(root_);
    RunConfig::Synthetic s;
    s.seed = 7;
    bundle_ = run_synthetic(s, root_);
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }
  static inline fs::path root_;
  static inline SyntheticBundle bundle_;
};

TEST_F(SweepTest, ZeroLimitSaturationAndMonotonicity) {
  auto cfg = load_run_config(bundle_.config);
  cfg.out_dir = dir_ / "out";
  cfg.sweep_km = {0, 5, 15, 25, 40, 60, 100, 1000};
  Pipeline p(cfg);
  const auto rows = p.sweep_distance();
  std::map<double, std::size_t> counts;
  for (const auto &r : rows)
    counts[r.max_km] = r.n_corrected;
  std::size_t prev = 0;
  for (const auto &[km, n] : counts) {
    EXPECT_GE(n, prev) << km;
    prev = n;
  }
  EXPECT_EQ(counts.at(0), 0u);
  // every park has some qualified station within 1000 km
  EXPECT_EQ(counts.at(1000), p.inputs().parks.size());

  // the 0 km rows equal the uncorrected run
  const auto none = p.simulate_one(cfg.interpolations.front(), CorrectionMethod::none,
                                   cfg.max_station_km, CorrectionMethod::none);
  const auto base =
      evaluate(none.all_regions(), p.inputs().observed, none.capacity, "x");
  std::size_t compared = 0;
  for (const auto &r : rows) {
    if (r.max_km != 0)
      continue;
    const auto it = std::find_if(base.begin(), base.end(),
                                 [&](const MetricReport &b) { return b.region == r.region; });
    ASSERT_NE(it, base.end());
    EXPECT_EQ(it->rmse, r.report.rmse);
    EXPECT_EQ(it->mbe, r.report.mbe);
    ++compared;
  }
  EXPECT_EQ(compared, base.size());
}

TEST_F(SweepTest, GateDemotesNoisyStationPark) {
  auto cfg = load_run_config(bundle_.config);
  cfg.out_dir = dir_ / "out";
  Pipeline p(cfg);
  const auto r = p.simulate_one(Interpolation::nearest, CorrectionMethod::hm_station,
                                cfg.max_station_km, CorrectionMethod::none);
  std::size_t demoted = 0, kept = 0;
  for (const auto &o : r.outcomes) {
    if (o.status != ParkStatus::corrected)
      continue;
    if (o.applied == CorrectionMethod::mean_station && o.fell_back)
      ++demoted;
    if (o.applied == CorrectionMethod::hm_station)
      ++kept;
  }
  EXPECT_GE(demoted, 1u);
  EXPECT_GE(kept, 1u);
}
