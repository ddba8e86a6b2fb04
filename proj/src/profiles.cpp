#include "ressize/profiles.hpp"

#include "ressize/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <string_view>

namespace ressize {

HourlySeries::HourlySeries(Eigen::ArrayXd values, int start_weekday)
    : values_(std::move(values)), start_weekday_(start_weekday) {
  if (values_.size() == 0 || values_.size() % kHoursPerYear != 0)
    throw std::invalid_argument(
        fmt::format("series length {} is not a positive multiple of {}", values_.size(), kHoursPerYear));
  if (start_weekday_ < 0 || start_weekday_ >= kDaysPerWeek)
    throw std::invalid_argument(fmt::format("start weekday {} out of range", start_weekday_));
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0)
      throw std::invalid_argument(fmt::format("series value at slot {} is negative or not finite", i));
  }
}

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilTime {
  std::int64_t year;
  unsigned month, day, hour;
};

CivilTime civil_from_hours(std::int64_t hours) {
  std::int64_t days = hours >= 0 ? hours / 24 : (hours - 23) / 24;
  const auto hour = static_cast<unsigned>(hours - days * 24);
  days += 719468;
  const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const auto doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2), m, d, hour};
}

bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) {
  if (m == 2 && is_leap(y)) return 29;
  return static_cast<unsigned>(kMonthDays[m - 1]);
}

std::string format_hour(std::int64_t hours) {
  const CivilTime c = civil_from_hours(hours);
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:00:00", c.year, c.month, c.day, c.hour);
}

bool is_feb29(std::int64_t hours) {
  const CivilTime c = civil_from_hours(hours);
  return c.month == 2 && c.day == 29;
}

template <typename Int>
bool parse_fixed(std::string_view s, std::size_t pos, std::size_t len, Int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return res.ec == std::errc{};
}

// Accepts YYYY-MM-DD[T| ]HH[:MM[:SS]][Z]; minutes and seconds must be zero.
std::optional<std::int64_t> parse_timestamp(std::string_view s) {
  if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.remove_suffix(1);
  std::int64_t y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, se = 0;
  if (!parse_fixed(s, 0, 4, y) || s.size() < 13 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!parse_fixed(s, 5, 2, mo) || !parse_fixed(s, 8, 2, d)) return std::nullopt;
  if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
  if (!parse_fixed(s, 11, 2, h)) return std::nullopt;
  std::size_t pos = 13;
  if (pos < s.size()) {
    if (s[pos] != ':' || !parse_fixed(s, pos + 1, 2, mi)) return std::nullopt;
    pos += 3;
    if (pos < s.size()) {
      if (s[pos] != ':' || !parse_fixed(s, pos + 1, 2, se)) return std::nullopt;
      pos += 3;
    }
  }
  if (pos != s.size()) return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > days_in_month(y, mo) || h > 23 || mi != 0 || se != 0)
    return std::nullopt;
  return days_from_civil(y, mo, d) * 24 + h;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int weekday_of_hours(std::int64_t hours) {
  std::int64_t days = hours >= 0 ? hours / 24 : (hours - 23) / 24;
  // 1970-01-01 was a Thursday.
  return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

}  // namespace

HourlySeries ingest_hourly_csv(const std::filesystem::path& path, int expected_year_count) {
  const std::string src = path.string();
  if (expected_year_count < 1) throw DataError(src, 0, "expected year count must be at least 1");
  std::ifstream in(path);
  if (!in) throw DataError(src, 0, "cannot open file");

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(src, 1, "missing header");
  ++line_no;
  std::string_view header = trim(line);
  if (header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  if (header != "timestamp,power_kw")
    throw DataError(src, line_no, "header must be 'timestamp,power_kw'");

  const std::size_t expected_rows = static_cast<std::size_t>(expected_year_count) * kHoursPerYear;
  std::vector<double> values;
  values.reserve(expected_rows);
  std::optional<std::int64_t> first, prev;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw DataError(src, line_no, "expected two comma-separated fields");
    const auto ts = parse_timestamp(trim(row.substr(0, comma)));
    if (!ts) throw DataError(src, line_no, "malformed timestamp");
    const std::string_view num = trim(row.substr(comma + 1));
    double power = 0.0;
    const auto res = std::from_chars(num.data(), num.data() + num.size(), power);
    if (res.ec != std::errc{} || res.ptr != num.data() + num.size() || !std::isfinite(power))
      throw DataError(src, line_no, "malformed power value");
    if (power < 0.0) throw DataError(src, line_no, fmt::format("negative power {}", power));

    if (is_feb29(*ts)) continue;
    if (prev) {
      std::int64_t expected = *prev + 1;
      if (is_feb29(expected)) expected += 24;
      if (*ts < expected)
        throw DataError(src, line_no, fmt::format("duplicate or out-of-order timestamp {}", format_hour(*ts)));
      if (*ts > expected)
        throw DataError(src, line_no, fmt::format("gap: missing timestamp {}", format_hour(expected)));
    } else {
      first = ts;
    }
    prev = ts;
    values.push_back(power);
  }
  if (values.size() != expected_rows)
    throw DataError(src, 0, fmt::format("expected {} hourly rows, found {}", expected_rows, values.size()));

  Eigen::ArrayXd arr = Eigen::Map<const Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return HourlySeries(std::move(arr), weekday_of_hours(*first));
}

void write_hourly_csv(const std::filesystem::path& path, const HourlySeries& series, int first_year) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "timestamp,power_kw\n");
  std::int64_t t = days_from_civil(first_year, 1, 1) * 24;
  for (Eigen::Index i = 0; i < series.size(); ++i) {
    if (is_feb29(t)) t += 24;
    const CivilTime c = civil_from_hours(t);
    fmt::format_to(std::back_inserter(buf), "{:04d}-{:02d}-{:02d}T{:02d}:00:00,{:.6f}\n", c.year, c.month, c.day,
                   c.hour, series[i]);
    ++t;
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

std::array<double, 12> monthly_totals(const HourlySeries& series) {
  std::array<double, 12> totals{};
  Eigen::Index slot = 0;
  for (int m = 0; m < 12; ++m) {
    const Eigen::Index len = static_cast<Eigen::Index>(kMonthDays[m]) * kHoursPerDay;
    totals[m] = series.values().segment(slot, len).sum();
    slot += len;
  }
  return totals;
}

HourlySeries synth_pv_profile(const PvSynthParams& p) {
  if (!(p.annual_kwh_per_kwp > 0.0)) throw std::invalid_argument("annual_kwh_per_kwp must be positive");
  if (!(p.seasonal_amplitude >= 0.0 && p.seasonal_amplitude <= 1.0))
    throw std::invalid_argument("seasonal_amplitude must lie in [0, 1]");
  if (!(p.noise_level >= 0.0)) throw std::invalid_argument("noise_level must be non-negative");
  if (!(p.sunrise_hour >= 0.0 && p.sunrise_hour < p.sunset_hour && p.sunset_hour <= 24.0))
    throw std::invalid_argument("sunrise/sunset hours invalid");

  std::array<double, kHoursPerDay> shape{};
  const double daylight = p.sunset_hour - p.sunrise_hour;
  for (int h = 0; h < kHoursPerDay; ++h) {
    const double t = h + 0.5;
    if (t > p.sunrise_hour && t < p.sunset_hour) {
      const double s = std::sin(std::numbers::pi * (t - p.sunrise_hour) / daylight);
      shape[h] = s * s;
    }
  }

  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::ArrayXd values(kHoursPerYear);
  for (int d = 0; d < kDaysPerYear; ++d) {
    const double phase = 2.0 * std::numbers::pi * (d + 1 - p.peak_day) / kDaysPerYear;
    const double season = 1.0 + p.seasonal_amplitude * std::cos(phase);
    // Draw unconditionally so the stream does not depend on the noise level.
    const double z = normal(rng);
    const double weather = std::clamp(1.0 + p.noise_level * z, 0.0, 2.0);
    for (int h = 0; h < kHoursPerDay; ++h) values[d * kHoursPerDay + h] = shape[h] * season * weather;
  }
  const double total = values.sum();
  if (!(total > 0.0)) throw std::invalid_argument("generated PV profile has no output");
  values *= p.annual_kwh_per_kwp / total;
  return HourlySeries(std::move(values), Monday);
}

HourlySeries synth_pv_profile(double annual_kwh_per_kwp, double seasonal_amplitude, double noise_level,
                              std::uint64_t seed) {
  PvSynthParams p;
  p.annual_kwh_per_kwp = annual_kwh_per_kwp;
  p.seasonal_amplitude = seasonal_amplitude;
  p.noise_level = noise_level;
  p.seed = seed;
  return synth_pv_profile(p);
}

HourlySeries synth_load_profile(const LoadSynthParams& p) {
  if (!(p.annual_kwh > 0.0)) throw std::invalid_argument("annual_kwh must be positive");
  if (!(p.day_night_ratio > 0.0)) throw std::invalid_argument("day_night_ratio must be positive");
  if (!(p.weekend_factor > 0.0)) throw std::invalid_argument("weekend_factor must be positive");
  if (!(p.noise_level >= 0.0 && p.noise_level < 1.0)) throw std::invalid_argument("noise_level must lie in [0, 1)");
  if (!(p.day_start_hour >= 0 && p.day_start_hour <= p.day_end_hour && p.day_end_hour <= kHoursPerDay))
    throw std::invalid_argument("daytime hours invalid");

  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::ArrayXd values(kHoursPerYear);
  for (int i = 0; i < kHoursPerYear; ++i) {
    const int hour = i % kHoursPerDay;
    const int weekday = (i / kHoursPerDay) % kDaysPerWeek;
    double w = (hour >= p.day_start_hour && hour < p.day_end_hour) ? p.day_night_ratio : 1.0;
    if (weekday == Saturday || weekday == Sunday) w *= p.weekend_factor;
    const double z = normal(rng);
    w *= std::max(0.05, 1.0 + p.noise_level * z);
    values[i] = w;
  }
  values *= p.annual_kwh / values.sum();
  return HourlySeries(std::move(values), Monday);
}

HourlySeries synth_load_profile(double annual_kwh, double day_night_ratio, double weekend_factor,
                                std::uint64_t seed) {
  LoadSynthParams p;
  p.annual_kwh = annual_kwh;
  p.day_night_ratio = day_night_ratio;
  p.weekend_factor = weekend_factor;
  p.noise_level = 0.0;
  p.seed = seed;
  return synth_load_profile(p);
}

const char* to_string(RateBand band) {
  switch (band) {
    case RateBand::Peak: return "peak";
    case RateBand::Shoulder: return "shoulder";
    case RateBand::OffPeak: return "offpeak";
  }
  return "?";
}

TariffSchedule::TariffSchedule(BandCalendar calendar, BandRates first_year_rates, std::vector<double> price_factors)
    : calendar_(calendar), rates_(first_year_rates), factors_(std::move(price_factors)) {
  for (const auto& day : calendar_)
    for (RateBand b : day)
      if (static_cast<int>(b) >= kBandCount) throw std::invalid_argument("calendar holds an unknown band");
  for (double r : rates_)
    if (!(r > 0.0)) throw std::invalid_argument("tariff rates must be positive");
  if (factors_.empty()) throw std::invalid_argument("price factors must cover at least one year");
  for (double k : factors_)
    if (!(k > 0.0)) throw std::invalid_argument("price factors must be positive");
  if (factors_.front() != 1.0) throw std::invalid_argument("price factor of year 1 must equal 1");
}

BandCalendar TariffSchedule::standard_calendar() {
  BandCalendar cal{};
  for (int d = 0; d < kDaysPerWeek; ++d) {
    for (int h = 0; h < kHoursPerDay; ++h) {
      RateBand b = RateBand::OffPeak;
      if (d == Sunday) {
        if (h >= 4 && h < 22) b = RateBand::Shoulder;
      } else if ((h >= 10 && h < 12) || (h >= 17 && h < 20)) {
        b = RateBand::Peak;
      } else if (h >= 4 && h < 22) {
        b = RateBand::Shoulder;
      }
      cal[d][h] = b;
    }
  }
  return cal;
}

TariffSchedule TariffSchedule::standard(BandRates first_year_rates, int horizon_years) {
  if (horizon_years < 1) throw std::invalid_argument("horizon must be at least one year");
  return TariffSchedule(standard_calendar(), first_year_rates,
                        std::vector<double>(static_cast<std::size_t>(horizon_years), 1.0));
}

double TariffSchedule::price_factor(int year) const {
  if (year < 1 || year > horizon_years())
    throw std::out_of_range(fmt::format("year {} outside tariff horizon 1..{}", year, horizon_years()));
  return factors_[static_cast<std::size_t>(year - 1)];
}

BandRate tariff_band_at(const TariffSchedule& schedule, int day_of_week, int hour_of_day) {
  if (day_of_week < 0 || day_of_week >= kDaysPerWeek || hour_of_day < 0 || hour_of_day >= kHoursPerDay)
    throw std::out_of_range(fmt::format("invalid week-hour ({}, {})", day_of_week, hour_of_day));
  const RateBand b = schedule.band(day_of_week, hour_of_day);
  return {b, schedule.first_year_rate(b)};
}

void PvPlantConfig::validate() const {
  if (base_series.empty()) throw std::invalid_argument("PV base series is empty");
  if (!(base_kwp > 0.0)) throw std::invalid_argument("PV base_kwp must be positive");
  if (!(depreciation_rate >= 0.0 && depreciation_rate < 1.0))
    throw std::invalid_argument("PV depreciation rate must lie in [0, 1)");
}

double pv_scale_factor(const PvPlantConfig& plant, double new_kwp, int year) {
  if (new_kwp < 0.0) throw std::invalid_argument("PV size must be non-negative");
  const double derate = std::max(0.0, 1.0 - plant.depreciation_rate * (year - 1));
  return new_kwp / plant.base_kwp * derate;
}

double scaled_pv_output(const PvPlantConfig& plant, double new_kwp, int year, int hour, int horizon_years) {
  if (year < 1 || year > horizon_years)
    throw std::out_of_range(fmt::format("year {} outside horizon 1..{}", year, horizon_years));
  if (hour < 0 || hour >= kHoursPerYear) throw std::out_of_range(fmt::format("hour {} outside 0..8759", hour));
  const int base_year = (year - 1) % plant.base_series.years();
  return plant.base_series[static_cast<Eigen::Index>(base_year) * kHoursPerYear + hour] *
         pv_scale_factor(plant, new_kwp, year);
}

}  // namespace ressize
