#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "windsim/fleet.hpp"

using namespace windsim;

namespace {

WindPark park(std::string id, std::string state, Subsystem sub, double mw,
              Day commissioned) {
  WindPark p;
  p.park_id = std::move(id);
  p.name = p.park_id;
  p.location = GridPoint(-5.0, -37.0);
  p.state = std::move(state);
  p.subsystem = sub;
  p.installed_capacity_mw = mw;
  p.n_turbines = std::size_t(mw / 2.0);
  p.turbine.capacity_kw = 2000;
  p.commissioning_date = commissioned;
  return p;
}

std::vector<WindPark> random_fleet(std::mt19937_64 &rng, std::size_t n) {
  const char *states[] = {"BA", "CE", "RN", "PI", "PE", "RS", "SC", "MA"};
  const Subsystem subs[] = {Subsystem::north_east, Subsystem::north_east,
                            Subsystem::north_east, Subsystem::north_east,
                            Subsystem::north_east, Subsystem::south,
                            Subsystem::south,      Subsystem::north};
  std::uniform_int_distribution<int> st(0, 7), day(0, 700);
  std::uniform_real_distribution<double> mw(4, 200);
  std::vector<WindPark> out;
  for (std::size_t k = 0; k < n; ++k) {
    const int s = st(rng);
    out.push_back(park("P" + std::to_string(1000 + k), states[s], subs[s], mw(rng),
                       make_day(2014, 1, 1) + std::chrono::days{day(rng)}));
  }
  return out;
}

std::map<std::string, GenerationSeries>
random_generation(std::mt19937_64 &rng, const std::vector<WindPark> &parks,
                  Day last) {
  std::uniform_real_distribution<double> cf(0, 1);
  std::map<std::string, GenerationSeries> out;
  for (const auto &p : parks) {
    GenerationSeries s;
    s.label = p.park_id;
    for (Day d = p.commissioning_date; d <= last; d += std::chrono::days{1}) {
      s.dates.push_back(d);
      s.values.push_back(cf(rng) * p.installed_capacity_mw * 24 / 1000);
    }
    out.emplace(p.park_id, std::move(s));
  }
  return out;
}

} // namespace

TEST(CapacityTimeseries, Examples) {
  std::vector<WindPark> parks = {
      park("A", "CE", Subsystem::north_east, 30, make_day(2015, 3, 10)),
      park("B", "CE", Subsystem::north_east, 50, make_day(2015, 6, 1)),
      park("C", "RS", Subsystem::south, 20, make_day(2015, 4, 1))};
  const auto s = capacity_timeseries(parks, nullptr, make_day(2015, 3, 1),
                                     make_day(2015, 7, 1), "all");
  EXPECT_EQ(s.values.front(), 0.0);
  EXPECT_EQ(s.values.back(), 100.0);
  const auto at = [&](Day d) {
    return s.values[std::size_t((d - s.dates.front()).count())];
  };
  EXPECT_EQ(at(make_day(2015, 3, 9)), 0.0);
  EXPECT_EQ(at(make_day(2015, 3, 10)), 30.0);
  EXPECT_EQ(at(make_day(2015, 5, 1)), 50.0);

  const auto ce = capacity_timeseries(parks, region_filter(Grouping::state, "CE"),
                                      make_day(2015, 7, 1), make_day(2015, 7, 1));
  EXPECT_EQ(ce.values.front(), 80.0);
  EXPECT_THROW(capacity_timeseries(parks, region_filter(Grouping::state, "BA"),
                                   make_day(2015, 7, 1), make_day(2015, 7, 2)),
               EmptyRegionError);
  EXPECT_THROW(capacity_timeseries(parks, nullptr, make_day(2015, 7, 2),
                                   make_day(2015, 7, 1)),
               Error);
}

TEST(CapacityTimeseries, MatchesPerDayScanAndIsMonotone) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const auto parks = random_fleet(rng, 40);
    const Day first = make_day(2013, 12, 1), last = make_day(2016, 1, 31);
    const auto s = capacity_timeseries(
        parks, region_filter(Grouping::subsystem, "NorthEast"), first, last);
    for (std::size_t i = 0; i < s.size(); ++i) {
      double want = 0;
      for (const auto &p : parks)
        if (p.subsystem == Subsystem::north_east && p.commissioning_date <= s.dates[i])
          want += p.installed_capacity_mw;
      EXPECT_NEAR(s.values[i], want, 1e-9);
      if (i > 0) {
        EXPECT_GE(s.values[i], s.values[i - 1]);
      }
    }
  }
}

TEST(CapacityCorrection, Factor) {
  CapacitySeries model{"Brazil", {}, {}};
  for (int d = 0; d < 365; ++d) {
    model.dates.push_back(make_day(2016, 1, 1) + std::chrono::days{d});
    model.values.push_back(8000.0 + 10.0 * d);
  }
  EXPECT_EQ(capacity_correction_factor(model, model), 1.0);
  auto ref = model;
  for (auto &v : ref.values)
    v *= 0.93;
  EXPECT_NEAR(capacity_correction_factor(ref, model), 0.93, 1e-12);

  CapacitySeries later{"x", {make_day(2020, 1, 1)}, {5.0}};
  EXPECT_THROW(capacity_correction_factor(later, model), Error);
  CapacitySeries zero = model;
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  EXPECT_THROW(capacity_correction_factor(model, zero), DegenerateInputError);
}

TEST(CapacityCorrection, RatioOfMeansOverOverlap) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> v(1, 1000);
  for (int k = 0; k < 100; ++k) {
    CapacitySeries a, b;
    for (int d = 0; d < 200; ++d) {
      a.dates.push_back(make_day(2016, 1, 1) + std::chrono::days{d});
      a.values.push_back(v(rng));
      b.dates.push_back(make_day(2016, 3, 1) + std::chrono::days{d});
      b.values.push_back(v(rng));
    }
    // overlap: a from index 60 (Mar 1 2016) to 199, b from 0 to 139
    double sa = 0, sb = 0;
    for (int i = 0; i < 140; ++i) {
      sa += a.values[std::size_t(60 + i)];
      sb += b.values[std::size_t(i)];
    }
    EXPECT_NEAR(capacity_correction_factor(a, b), (sa / 140) / (sb / 140), 1e-12);
  }
}

TEST(CapacityCorrection, Apply) {
  GenerationSeries g{"x", {make_day(2016, 1, 1), make_day(2016, 1, 2)}, {10, 4}};
  EXPECT_EQ(apply_capacity_correction(g, 1.0).values, g.values);
  const auto half = apply_capacity_correction(g, 0.5);
  EXPECT_EQ(half.values[0], 5.0);
  EXPECT_EQ((half.values[0] + half.values[1]) / 2, 0.5 * (10 + 4) / 2);
  EXPECT_THROW(apply_capacity_correction(g, 0.0), DegenerateInputError);
}

TEST(Aggregate, SingletonAndAdditivity) {
  std::vector<WindPark> parks = {
      park("A", "CE", Subsystem::north_east, 30, make_day(2015, 1, 1)),
      park("B", "CE", Subsystem::north_east, 50, make_day(2015, 1, 1))};
  std::map<std::string, GenerationSeries> gen;
  for (const auto &p : parks)
    gen[p.park_id] = GenerationSeries{p.park_id,
                                      {make_day(2015, 1, 1), make_day(2015, 1, 2)},
                                      {1.0, 1.0}};
  std::map<std::string, GenerationSeries> only_a{{"A", gen["A"]}};
  const auto single = aggregate_generation(only_a, parks, Grouping::state);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single.at("CE").values, gen["A"].values);
  EXPECT_EQ(single.at("CE").dates, gen["A"].dates);

  const auto both = aggregate_generation(gen, parks, Grouping::country);
  EXPECT_EQ(both.at("Brazil").values, (std::vector<double>{2.0, 2.0}));
  EXPECT_THROW(parse_grouping("municipality"), Error);
}

TEST(Aggregate, ConservationAcrossLevels) {
  std::mt19937_64 rng(99);
  const auto parks = random_fleet(rng, 50);
  const Day last = make_day(2015, 12, 31);
  const auto gen = random_generation(rng, parks, last);

  const auto country = aggregate_generation(gen, parks, Grouping::country).at("Brazil");
  const auto subs = aggregate_generation(gen, parks, Grouping::subsystem);
  const auto states = aggregate_generation(gen, parks, Grouping::state);
  EXPECT_FALSE(subs.contains("North"));

  std::map<Day, double> sub_plus_north, state_sum, park_sum;
  for (const auto &[l, s] : subs)
    for (std::size_t i = 0; i < s.size(); ++i)
      sub_plus_north[s.dates[i]] += s.values[i];
  for (const auto &p : parks) {
    const auto &s = gen.at(p.park_id);
    for (std::size_t i = 0; i < s.size(); ++i) {
      park_sum[s.dates[i]] += s.values[i];
      if (p.subsystem == Subsystem::north)
        sub_plus_north[s.dates[i]] += s.values[i];
    }
  }
  for (const auto &[l, s] : states)
    for (std::size_t i = 0; i < s.size(); ++i)
      state_sum[s.dates[i]] += s.values[i];

  ASSERT_EQ(sub_plus_north.size(), country.size());
  for (std::size_t i = 0; i < country.size(); ++i) {
    EXPECT_NEAR(country.values[i], sub_plus_north.at(country.dates[i]), 1e-9);
    EXPECT_NEAR(state_sum.at(country.dates[i]), park_sum.at(country.dates[i]), 1e-9);
  }
}

TEST(Aggregate, RegionStartsAtEarliestMemberAndBoundedByCapacity) {
  std::mt19937_64 rng(3);
  const auto parks = random_fleet(rng, 30);
  const Day last = make_day(2015, 12, 31);
  const auto gen = random_generation(rng, parks, last);
  for (const auto &[label, s] :
       aggregate_generation(gen, parks, Grouping::subsystem)) {
    Day earliest = last;
    for (const auto &p : parks)
      if (to_string(p.subsystem) == label)
        earliest = std::min(earliest, p.commissioning_date);
    EXPECT_EQ(s.dates.front(), earliest);
    const auto cap = capacity_timeseries(parks, region_filter(Grouping::subsystem, label),
                                         s.dates.front(), s.dates.back());
    for (std::size_t i = 0; i < s.size(); ++i)
      EXPECT_LE(s.values[i], cap.values[i] * 24 / 1000 + 1e-9);
  }
}

TEST(Aggregate, PermutationInvariant) {
  std::mt19937_64 rng(12);
  auto parks = random_fleet(rng, 50);
  const auto gen = random_generation(rng, parks, make_day(2015, 12, 31));
  const auto a = aggregate_generation(gen, parks, Grouping::country).at("Brazil");
  std::shuffle(parks.begin(), parks.end(), rng);
  const auto b = aggregate_generation(gen, parks, Grouping::country).at("Brazil");
  EXPECT_EQ(a.values, b.values); // bitwise
}

TEST(Park, CapacityConsistencyWarning) {
  auto p = park("A", "CE", Subsystem::north_east, 30, make_day(2015, 1, 1));
  EXPECT_FALSE(check_park(p));
  p.n_turbines = 10; // implies 20 MW
  EXPECT_TRUE(check_park(p));
  p.installed_capacity_mw = 0;
  EXPECT_THROW(check_park(p), Error);
}
