#include "ressize/errors.hpp"
#include "ressize/profiles.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <algorithm>
#include <numeric>

using namespace ressize;
using testutil::hourly_csv;
using testutil::scratch_dir;
using testutil::write_file;

namespace {

std::string ingest_error(const std::filesystem::path& p, int years) {
  try {
    ingest_hourly_csv(p, years);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

std::size_t ingest_error_line(const std::filesystem::path& p, int years) {
  try {
    ingest_hourly_csv(p, years);
  } catch (const DataError& e) {
    return e.line();
  }
  return 0;
}

// Per-day energy of each month of a one-year series.
std::array<double, 12> monthly_daily_means(const HourlySeries& s) {
  std::array<double, 12> out{};
  int day = 0;
  for (int m = 0; m < 12; ++m) {
    double sum = 0.0;
    for (int d = 0; d < kMonthDays[m]; ++d, ++day)
      for (int h = 0; h < 24; ++h) sum += s[day * 24 + h];
    out[m] = sum / kMonthDays[m];
  }
  return out;
}

std::string fmt_leap_row(int h) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "2020-02-29T%02d:00:00,1.000\n", h);
  return buf;
}

// Table-driven calendar written independently of the library.
RateBand expected_band(int dow, int hour) {
  const bool sunday = dow == 6;
  if (!sunday && ((hour >= 10 && hour < 12) || (hour >= 17 && hour < 20))) return RateBand::Peak;
  if (!sunday && ((hour >= 4 && hour < 10) || (hour >= 12 && hour < 17) || (hour >= 20 && hour < 22)))
    return RateBand::Shoulder;
  if (sunday && hour >= 4 && hour < 22) return RateBand::Shoulder;
  return RateBand::OffPeak;
}

}  // namespace

TEST_SUITE("ingest_hourly_csv") {
  TEST_CASE("well-formed year has 8760 slots and weekday from the first timestamp") {
    const auto dir = scratch_dir("ingest_ok");
    write_file(dir / "a.csv", hourly_csv(2018, 8760, 2.5));
    const auto s = ingest_hourly_csv(dir / "a.csv", 1);
    CHECK(s.size() == 8760);
    CHECK(s.start_weekday() == Monday);  // 2018-01-01
    CHECK(s.sum() == doctest::Approx(2.5 * 8760));

    write_file(dir / "b.csv", hourly_csv(2019, 8760));
    CHECK(ingest_hourly_csv(dir / "b.csv", 1).start_weekday() == Tuesday);
  }

  TEST_CASE("leap day rows are dropped") {
    const auto dir = scratch_dir("ingest_leap");
    // Full 2020 including Feb 29 written by hand.
    std::string text = hourly_csv(2020, 8760);
    std::string with_leap = "timestamp,power_kw\n";
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      with_leap += line + "\n";
      if (line.rfind("2020-02-28T23", 0) == 0)
        for (int h = 0; h < 24; ++h) with_leap += fmt_leap_row(h);
    }
    write_file(dir / "leap.csv", with_leap);
    const auto s = ingest_hourly_csv(dir / "leap.csv", 1);
    CHECK(s.size() == 8760);
    CHECK(s.sum() == doctest::Approx(8760.0));
  }

  TEST_CASE("multi-year file") {
    const auto dir = scratch_dir("ingest_multi");
    write_file(dir / "m.csv", hourly_csv(2018, 2 * 8760));
    CHECK(ingest_hourly_csv(dir / "m.csv", 2).years() == 2);
    CHECK(ingest_error(dir / "m.csv", 1).find("expected 8760") != std::string::npos);
  }

  TEST_CASE("missing hour names the gap") {
    const auto dir = scratch_dir("ingest_gap");
    std::string text = hourly_csv(2018, 8760);
    const auto pos = text.find("2018-03-05T07:00:00");
    text.erase(pos, text.find('\n', pos) - pos + 1);
    write_file(dir / "g.csv", text + "2018-12-31T23:00:00,1.0\n");
    const std::string msg = ingest_error(dir / "g.csv", 1);
    CHECK(msg.find("gap") != std::string::npos);
    CHECK(msg.find("2018-03-05T07:00") != std::string::npos);
  }

  TEST_CASE("negative power reports its line") {
    const auto dir = scratch_dir("ingest_neg");
    std::string text = hourly_csv(2018, 8760);
    const auto pos = text.find("2018-01-01T05:00:00,1.000");
    text.replace(pos, 25, "2018-01-01T05:00:00,-3.0");
    write_file(dir / "n.csv", text);
    CHECK(ingest_error(dir / "n.csv", 1).find("negative") != std::string::npos);
    CHECK(ingest_error_line(dir / "n.csv", 1) == 7);  // header + hours 0..5
  }

  TEST_CASE("duplicate, malformed, header and missing-file errors") {
    const auto dir = scratch_dir("ingest_bad");
    std::string text = hourly_csv(2018, 3);
    write_file(dir / "dup.csv", text + "2018-01-01T02:00:00,1.0\n");
    CHECK(ingest_error(dir / "dup.csv", 1).find("duplicate") != std::string::npos);

    write_file(dir / "mal.csv", text + "2018-01-01T03:00:00;1.0\n");
    CHECK(ingest_error_line(dir / "mal.csv", 1) == 5);

    write_file(dir / "num.csv", text + "2018-01-01T03:00:00,abc\n");
    CHECK(ingest_error(dir / "num.csv", 1).find("malformed power") != std::string::npos);

    write_file(dir / "hdr.csv", "time,kw\n");
    CHECK(ingest_error(dir / "hdr.csv", 1).find("header") != std::string::npos);

    CHECK(ingest_error(dir / "absent.csv", 1).find("cannot open") != std::string::npos);
  }

  TEST_CASE("write then ingest round trip") {
    const auto dir = scratch_dir("ingest_rt");
    const auto s = synth_load_profile(1.0e6, 1.5, 0.7, 3);
    write_hourly_csv(dir / "rt.csv", s);
    const auto back = ingest_hourly_csv(dir / "rt.csv", 1);
    CHECK((back.values() - s.values()).abs().maxCoeff() <= 5e-7);
  }
}

TEST_SUITE("synth_pv_profile") {
  TEST_CASE("zero amplitude and noise: identical days, equal daily means") {
    const auto s = synth_pv_profile(1460.0, 0.0, 0.0, 9);
    for (int d = 1; d < kDaysPerYear; ++d)
      for (int h = 0; h < 24; ++h) REQUIRE(s[d * 24 + h] == s[h]);
    const auto m = monthly_daily_means(s);
    const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
    CHECK(*hi / *lo - 1.0 <= 0.03);
  }

  TEST_CASE("annual yield matches the target for any seed") {
    for (std::uint64_t seed : {1u, 2u, 77u, 12345u}) {
      const auto s = synth_pv_profile(1460.0, 0.3, 0.2, seed);
      CHECK(std::abs(s.sum() - 1460.0) <= 1.46);
      CHECK(s.values().minCoeff() >= 0.0);
    }
  }

  TEST_CASE("seasonal envelope") {
    auto ratio = [](const HourlySeries& s) {
      const auto m = monthly_totals(s);
      return *std::max_element(m.begin(), m.end()) / *std::min_element(m.begin(), m.end());
    };
    CHECK(ratio(synth_pv_profile(1460.0, 0.8, 0.0, 1)) >= 3.0);
    PvSynthParams tropical;
    tropical.seasonal_amplitude = 0.1;
    tropical.noise_level = 0.15;
    tropical.seed = 7;
    CHECK(ratio(synth_pv_profile(tropical)) < 1.5);
  }

  TEST_CASE("daytime bell shape and dark nights") {
    const auto s = synth_pv_profile(1460.0, 0.0, 0.0, 1);
    CHECK(s[0] == 0.0);
    CHECK(s[23] == 0.0);
    CHECK(s[12] > s[8]);
    CHECK(s[11] == doctest::Approx(s[12]));
  }

  TEST_CASE("bit-reproducible per seed") {
    const auto a = synth_pv_profile(1500.0, 0.2, 0.3, 42);
    const auto b = synth_pv_profile(1500.0, 0.2, 0.3, 42);
    const auto c = synth_pv_profile(1500.0, 0.2, 0.3, 43);
    CHECK((a.values() == b.values()).all());
    CHECK(!(a.values() == c.values()).all());
  }

  TEST_CASE("amplitude out of range") {
    CHECK_THROWS_AS(synth_pv_profile(1460.0, 1.2, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(synth_pv_profile(1460.0, -0.1, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(synth_pv_profile(0.0, 0.1, 0.0, 1), std::invalid_argument);
  }
}

TEST_SUITE("synth_load_profile") {
  TEST_CASE("uniform case is flat") {
    const auto s = synth_load_profile(8760.0 * 50.0, 1.0, 1.0, 1);
    CHECK((s.values() - 50.0).abs().maxCoeff() <= 1e-9);
  }

  TEST_CASE("annual energy and positivity") {
    LoadSynthParams p;
    p.annual_kwh = 3.0e6;
    p.seed = 5;
    const auto s = synth_load_profile(p);
    CHECK(std::abs(s.sum() - 3.0e6) <= 3000.0);
    CHECK(s.values().minCoeff() > 0.0);
  }

  TEST_CASE("weekend factor scales Sundays against Tuesdays") {
    LoadSynthParams p;
    p.weekend_factor = 0.5;
    p.seed = 3;
    const auto s = synth_load_profile(p);
    double sun = 0.0, tue = 0.0;
    int n_sun = 0, n_tue = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s.weekday_at(i) == Sunday) sun += s[i], ++n_sun;
      if (s.weekday_at(i) == Tuesday) tue += s[i], ++n_tue;
    }
    CHECK((sun / n_sun) / (tue / n_tue) == doctest::Approx(0.5).epsilon(0.02));
  }

  TEST_CASE("deterministic and validated") {
    CHECK((synth_load_profile(1e6, 1.8, 0.6, 4).values() == synth_load_profile(1e6, 1.8, 0.6, 4).values()).all());
    CHECK_THROWS_AS(synth_load_profile(0.0, 1.8, 0.6, 1), std::invalid_argument);
    CHECK_THROWS_AS(synth_load_profile(-5.0, 1.8, 0.6, 1), std::invalid_argument);
  }
}

TEST_SUITE("tariff") {
  TEST_CASE("band lookup examples") {
    const auto t = TariffSchedule::standard();
    const auto a = tariff_band_at(t, Monday, 11);
    CHECK(a.band == RateBand::Peak);
    CHECK(a.rate == 0.187);
    const auto b = tariff_band_at(t, Sunday, 11);
    CHECK(b.band == RateBand::Shoulder);
    CHECK(b.rate == 0.107);
    const auto c = tariff_band_at(t, Monday, 2);
    CHECK(c.band == RateBand::OffPeak);
    CHECK(c.rate == 0.060);
  }

  TEST_CASE("calendar partitions the week 30/96/42 and matches the table") {
    const auto t = TariffSchedule::standard();
    std::array<int, 3> count{};
    for (int d = 0; d < 7; ++d)
      for (int h = 0; h < 24; ++h) {
        const RateBand b = tariff_band_at(t, d, h).band;
        CHECK(b == expected_band(d, h));
        ++count[static_cast<int>(b)];
      }
    CHECK(count[0] == 30);
    CHECK(count[1] == 96);
    CHECK(count[2] == 42);
  }

  TEST_CASE("price factors") {
    std::vector<double> k(25, 1.0);
    for (int y = 1; y < 25; ++y) k[static_cast<std::size_t>(y)] = 1.0 + 0.02 * y;
    const TariffSchedule t(TariffSchedule::standard_calendar(), {0.2, 0.1, 0.05}, k);
    CHECK(t.rate(RateBand::Peak, 1) == 0.2);
    CHECK(t.rate(RateBand::OffPeak, 11) == doctest::Approx(0.05 * 1.2));
    CHECK_THROWS_AS(t.price_factor(26), std::out_of_range);
    k[0] = 1.1;
    CHECK_THROWS_AS(TariffSchedule(TariffSchedule::standard_calendar(), {0.2, 0.1, 0.05}, k), std::invalid_argument);
    CHECK_THROWS_AS(TariffSchedule(TariffSchedule::standard_calendar(), {0.2, 0.0, 0.05}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(TariffSchedule(TariffSchedule::standard_calendar(), {0.2, 0.1, 0.05}, {1.0, -1.0}),
                    std::invalid_argument);
  }
}

TEST_SUITE("scaled_pv_output") {
  PvPlantConfig plant_with(double value, double base_kwp) {
    PvPlantConfig p;
    p.base_series = HourlySeries(Eigen::ArrayXd::Constant(kHoursPerYear, value));
    p.base_kwp = base_kwp;
    return p;
  }

  TEST_CASE("identity, linearity and depreciation") {
    const auto s = synth_pv_profile(1460.0, 0.2, 0.1, 3);
    PvPlantConfig p;
    p.base_series = HourlySeries(s.values() * 500.0);
    p.base_kwp = 500.0;
    for (int h = 0; h < kHoursPerYear; h += 97) CHECK(scaled_pv_output(p, 500.0, 1, h) == p.base_series[h]);

    const auto flat = plant_with(100.0, 250.0);
    CHECK(scaled_pv_output(flat, 500.0, 1, 12) == doctest::Approx(200.0));
    CHECK(scaled_pv_output(flat, 250.0, 25, 12) == doctest::Approx(86.80).epsilon(1e-12));
  }

  TEST_CASE("linear in size and non-increasing in year") {
    const auto flat = plant_with(40.0, 100.0);
    for (int y = 1; y <= 25; ++y) {
      const double a = scaled_pv_output(flat, 130.0, y, 5);
      const double b = scaled_pv_output(flat, 260.0, y, 5);
      CHECK(b == doctest::Approx(2.0 * a));
      if (y > 1) CHECK(a <= scaled_pv_output(flat, 130.0, y - 1, 5));
    }
    CHECK_THROWS_AS(scaled_pv_output(flat, 100.0, 26, 0), std::out_of_range);
    CHECK_THROWS_AS(scaled_pv_output(flat, 100.0, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(scaled_pv_output(flat, -1.0, 1, 0), std::invalid_argument);
  }

  TEST_CASE("multi-year base is used verbatim") {
    Eigen::ArrayXd v(2 * kHoursPerYear);
    v.head(kHoursPerYear).setConstant(10.0);
    v.tail(kHoursPerYear).setConstant(20.0);
    PvPlantConfig p;
    p.base_series = HourlySeries(v);
    p.base_kwp = 1.0;
    p.depreciation_rate = 0.0;
    CHECK(scaled_pv_output(p, 1.0, 1, 0) == 10.0);
    CHECK(scaled_pv_output(p, 1.0, 2, 0) == 20.0);
    CHECK(scaled_pv_output(p, 1.0, 3, 0) == 10.0);
  }
}

TEST_CASE("HourlySeries invariants") {
  CHECK_THROWS_AS(HourlySeries(Eigen::ArrayXd::Ones(100)), std::invalid_argument);
  Eigen::ArrayXd v = Eigen::ArrayXd::Ones(kHoursPerYear);
  v[3] = -1.0;
  CHECK_THROWS_AS(HourlySeries(v, Monday), std::invalid_argument);
  const HourlySeries s(Eigen::ArrayXd::Ones(kHoursPerYear), Saturday);
  CHECK(s.weekday_at(0) == Saturday);
  CHECK(s.weekday_at(24) == Sunday);
  CHECK(s.weekday_at(48) == Monday);
}
