#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "windsim/config.hpp"
#include "windsim/io.hpp"

using namespace windsim;

namespace {

class IoTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("windsim_io_" + std::string(::testing::UnitTest::GetInstance()
                                            ->current_test_info()
                                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string &name, const std::string &text) {
    const auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  fs::path dir_;
};

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

template <class Fn> IngestError ingest_error(Fn fn) {
  try {
    fn();
  } catch (const IngestError &e) {
    return e;
  }
  ADD_FAILURE() << "no IngestError";
  return IngestError("", 0, "");
}

const Hour kT0{make_day(2017, 3, 1)};

} // namespace

TEST(FormatNumber, SixSignificantDigits) {
  EXPECT_EQ(io::format_number(1.0 / 3.0), "0.333333");
  EXPECT_EQ(io::format_number(123456789.0), "1.23457e+08");
  EXPECT_EQ(io::format_number(-0.0), "0");
  EXPECT_EQ(io::format_number(2.5), "2.5");
  EXPECT_EQ(io::format_number(kMissing), "");
}

TEST_F(IoTest, WindGridRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-12, 12);
  GridGeometry g{-6.0, -38.125, 0.5, 0.625, 3, 4};
  const std::size_t nt = 5;
  WindGrid::Components c;
  for (auto *v : {&c.u10, &c.v10, &c.u50, &c.v50, &c.u2, &c.v2}) {
    v->resize(g.size() * nt);
    for (auto &x : *v)
      x = std::round(u(rng) * 1000) / 1000;
  }
  std::vector<double> d(g.size());
  for (std::size_t k = 0; k < d.size(); ++k)
    d[k] = 0.25 * double(k % 3);
  // disph varies by node but not in time
  const WindGrid w(g, kT0, nt, c, d);
  io::write_wind_grid(dir_ / "a.csv", w);
  const auto back = io::read_wind_grid(dir_ / "a.csv");
  EXPECT_EQ(back.n_times(), nt);
  EXPECT_EQ(back.start(), kT0);
  EXPECT_TRUE(back.has_2m());
  EXPECT_EQ(back.geometry().nlat, 3u);
  EXPECT_EQ(back.geometry().nlon, 4u);
  EXPECT_DOUBLE_EQ(back.field(Component::v50, 3).values[7], c.v50[3 * g.size() + 7]);
  io::write_wind_grid(dir_ / "b.csv", back);
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
}

TEST_F(IoTest, WindGridErrors) {
  const std::string head = "time,lat,lon,u10,v10,u50,v50,disph\n";
  const auto gap = write("gap.csv", head +
                                        "2017-01-01T00:00:00Z,0,0,1,1,1,1,0\n"
                                        "2017-01-01T02:00:00Z,0,0,1,1,1,1,0\n");
  const auto e = ingest_error([&] { io::read_wind_grid(gap); });
  EXPECT_EQ(e.line(), 3u);
  EXPECT_NE(std::string(e.what()).find("gap.csv"), std::string::npos);

  const auto bad = write("bad.csv", head + "2017-01-01T00:00:00Z,0,0,1,x,1,1,0\n");
  EXPECT_EQ(ingest_error([&] { io::read_wind_grid(bad); }).line(), 2u);

  const auto cols = write("cols.csv", "time,lat,lon,u10\n");
  EXPECT_THROW(io::read_wind_grid(cols), IngestError);
  EXPECT_THROW(io::read_wind_grid(dir_ / "absent.csv"), Error);
}

TEST_F(IoTest, RasterRoundTripAnyOrder) {
  const auto p = write("r.csv", "lat,lon,mean50\n"
                                "-5,-37,6.5\n"
                                "-5.05,-37,6.25\n"
                                "-5,-36.95,7\n"
                                "-5.05,-36.95,6.75\n");
  const auto r = io::read_raster(p);
  EXPECT_EQ(r.geometry().nlat, 2u);
  EXPECT_DOUBLE_EQ(raster_lookup(r, GridPoint(-5.0, -36.95), HeightTag::m50), 7.0);
  io::write_raster(dir_ / "a.csv", r);
  io::write_raster(dir_ / "b.csv", io::read_raster(dir_ / "a.csv"));
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));

  const auto hole = write("hole.csv", "lat,lon,mean50\n-5,-37,6.5\n-5.05,-37,6.25\n"
                                      "-5,-36.95,7\n");
  EXPECT_THROW(io::read_raster(hole), IngestError);
}

TEST_F(IoTest, ParksExclusionAndRoundTrip) {
  const auto p = write(
      "parks.csv",
      "park_id,name,lat,lon,state,subsystem,capacity_mw,n_turbines,turbine_kw,"
      "rotor_diameter_m,hub_height_m,commissioning_date\n"
      "P1,\"Alpha, Beta\",-5,-37,CE,NorthEast,30,15,2000,100,80,2014-05-01\n"
      "P2,Gamma,-5,-37,,NorthEast,30,15,2000,100,80,2014-05-01\n"
      "P3,Delta,-5,-37,RS,South,30,,2000,,,2015-01-01\n"
      "P4,Eps,-5,-37,MA,Nowhere,30,,2000,,,2015-01-01\n"
      "P5,Zeta,-5,-37,MA,North,12,,,,,\n");
  Warnings w;
  const auto t = io::read_parks(p, &w);
  ASSERT_EQ(t.parks.size(), 2u);
  EXPECT_EQ(t.parks[0].name, "Alpha, Beta");
  EXPECT_NEAR(*t.parks[0].turbine.specific_power, 2e6 / (M_PI * 2500), 1e-9);
  EXPECT_EQ(t.parks[1].n_turbines, 15u);
  EXPECT_FALSE(t.parks[1].turbine.hub_height_m);
  ASSERT_EQ(t.excluded.size(), 3u);
  EXPECT_EQ(t.excluded[0].park_id, "P2");
  EXPECT_EQ(t.excluded[2].reason, "missing commissioning date");
  EXPECT_EQ(w.messages.size(), 3u);

  io::write_parks(dir_ / "a.csv", t.parks);
  io::write_parks(dir_ / "b.csv", io::read_parks(dir_ / "a.csv").parks);
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));

  const auto dup = write("dup.csv", slurp(p) + "P1,x,-5,-37,CE,NorthEast,1,,,,,2014-01-01\n");
  EXPECT_EQ(ingest_error([&] { io::read_parks(dup); }).line(), 7u);
  const auto neg =
      write("neg.csv", "park_id,name,lat,lon,state,subsystem,capacity_mw,n_turbines,"
                       "turbine_kw,rotor_diameter_m,hub_height_m,commissioning_date\n"
                       "P1,x,-5,-37,CE,NorthEast,-3,,,,,2014-01-01\n");
  EXPECT_EQ(ingest_error([&] { io::read_parks(neg); }).line(), 2u);
}

TEST_F(IoTest, StationsAndMeasurements) {
  const auto s = write("st.csv", "station_id,lat,lon\nA,-5,-37\nB,-4.5,-36.5\n");
  const auto sites = io::read_stations(s);
  ASSERT_EQ(sites.size(), 2u);
  const auto m = write("m.csv", "station_id,time,speed_10m\n"
                                "A,2017-01-01T03:00:00Z,4.5\n"
                                "A,2017-01-01T00:00:00Z,3\n"
                                "B,2017-01-01T00:00:00Z,\n"
                                "B,2017-01-01T01:00:00Z,2\n");
  const auto ms = io::read_measurements(m, sites);
  const auto &a = ms.at("A").speed;
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a.values[0], 3.0);
  EXPECT_TRUE(std::isnan(a.values[1]));
  EXPECT_EQ(a.values[3], 4.5);
  EXPECT_TRUE(std::isnan(ms.at("B").speed.values[0]));

  io::write_measurements(dir_ / "a.csv", ms);
  io::write_measurements(dir_ / "b.csv", io::read_measurements(dir_ / "a.csv", sites));
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
  io::write_stations(dir_ / "s1.csv", sites);
  io::write_stations(dir_ / "s2.csv", io::read_stations(dir_ / "s1.csv"));
  EXPECT_EQ(slurp(dir_ / "s1.csv"), slurp(dir_ / "s2.csv"));

  const auto unknown = write("u.csv", "station_id,time,speed_10m\nC,2017-01-01T00:00:00Z,1\n");
  EXPECT_EQ(ingest_error([&] { io::read_measurements(unknown, sites); }).line(), 2u);
  const auto dup = write("d.csv", "station_id,time,speed_10m\n"
                                  "A,2017-01-01T00:00:00Z,1\n"
                                  "A,2017-01-01T00:00:00Z,2\n");
  EXPECT_EQ(ingest_error([&] { io::read_measurements(dup, sites); }).line(), 3u);
  const auto neg = write("n.csv", "station_id,time,speed_10m\nA,2017-01-01T00:00:00Z,-1\n");
  EXPECT_THROW(io::read_measurements(neg, sites), IngestError);
}

TEST_F(IoTest, DailySeriesAndReports) {
  const auto g = write("g.csv", "region,date,generation_gwh\n"
                                "CE,2017-01-02,1.5\n"
                                "BA,2017-01-01,2\n"
                                "CE,2017-01-01,1.25\n");
  const auto gen = io::read_generation(g);
  ASSERT_EQ(gen.size(), 2u);
  EXPECT_EQ(gen.at("CE").values, (std::vector<double>{1.25, 1.5}));
  io::write_generation(dir_ / "a.csv", gen);
  io::write_generation(dir_ / "b.csv", io::read_generation(dir_ / "a.csv"));
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));

  const auto dup = write("dup.csv", "region,date,generation_gwh\nCE,2017-01-01,1\n"
                                    "CE,2017-01-01,2\n");
  EXPECT_THROW(io::read_generation(dup), IngestError);
  const auto wrong = write("w.csv", "region,date,capacity_mw\nCE,2017-01-01,1\n");
  EXPECT_THROW(io::read_generation(wrong), IngestError);

  std::vector<MetricReport> reps(2);
  reps[0].region = "CE";
  reps[0].method = "nn:none";
  reps[0].n_days = 10;
  reps[0].correlation = 0.9;
  reps[0].rmse = 1.0 / 3;
  reps[0].rel_rmse = 0.125;
  reps[1] = reps[0];
  reps[1].method = "bli:mean_gwa";
  reps[1].correlation.reset();
  io::write_reports(dir_ / "r1.csv", reps);
  const auto back = io::read_reports(dir_ / "r1.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_FALSE(back[1].correlation);
  EXPECT_FALSE(back[1].rel_mbe);
  io::write_reports(dir_ / "r2.csv", back);
  EXPECT_EQ(slurp(dir_ / "r1.csv"), slurp(dir_ / "r2.csv"));
}

TEST_F(IoTest, HubTraining) {
  const auto p = write("h.csv", "diameter_m,hub_height_m\n100,100\n120,114\n");
  const auto rows = io::read_hub_training(p);
  ASSERT_EQ(rows.size(), 2u);
  io::write_hub_training(dir_ / "a.csv", rows);
  EXPECT_EQ(slurp(p), slurp(dir_ / "a.csv"));
  const auto bad = write("b.csv", "diameter_m,hub_height_m\n100,0\n");
  EXPECT_THROW(io::read_hub_training(bad), IngestError);
}

TEST(Config, ParseAndTypes) {
  const auto f = ConfigFile::parse("# comment\n"
                                   "a = 1/7\n"
                                   "b.c = x, y ,z\n"
                                   "flag = yes\n",
                                   "t.conf");
  EXPECT_DOUBLE_EQ(f.number("a", 0), 1.0 / 7);
  EXPECT_EQ(f.list("b.c", {}), (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_TRUE(f.boolean("flag", false));
  EXPECT_EQ(f.get_or("missing", "d"), "d");
  EXPECT_THROW(ConfigFile::parse("a = 1\na = 2\n", "t"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("novalue\n", "t"), ConfigError);
  EXPECT_THROW(f.number("b.c", 0), ConfigError);
}

TEST(Config, RunConfigValidation) {
  const auto ok = make_run_config(ConfigFile::parse("input.grid = g.csv\n"
                                                    "input.parks = p.csv\n"
                                                    "interpolation.method = bli, idw\n"
                                                    "biascorr.method = none\n",
                                                    "t"),
                                  "/base");
  EXPECT_EQ(ok.interpolations.size(), 2u);
  EXPECT_EQ(ok.input.grid, fs::path("/base/g.csv"));

  auto bad = [](const std::string &extra) {
    return ConfigFile::parse("input.grid = g.csv\ninput.parks = p.csv\n" + extra, "t");
  };
  EXPECT_THROW(make_run_config(bad("interpolation.method = spline\n"), "/"), ConfigError);
  EXPECT_THROW(make_run_config(bad("biascorr.min_correlation = 2\n"), "/"), ConfigError);
  EXPECT_THROW(make_run_config(bad("biascorr.max_station_km = -1\n"), "/"), ConfigError);
  EXPECT_THROW(make_run_config(bad("unknown.key = 1\n"), "/"), ConfigError);
  EXPECT_THROW(make_run_config(bad("simulation.start_date = 2017-02-01\n"
                                   "simulation.end_date = 2017-01-01\n"),
                               "/"),
               ConfigError);
  EXPECT_THROW(make_run_config(bad("biascorr.method = mean_station\n"), "/"), ConfigError);

  auto c = ok;
  const auto h = c.hash;
  apply_method_override(c, "nn:hm_station");
  EXPECT_EQ(c.interpolations, std::vector<Interpolation>{Interpolation::nearest});
  EXPECT_EQ(c.corrections, std::vector<CorrectionMethod>{CorrectionMethod::hm_station});
  EXPECT_NE(c.hash, h);
  EXPECT_THROW(apply_method_override(c, "bogus"), ConfigError);
}
