#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ressize {

inline constexpr int kHoursPerDay = 24;
inline constexpr int kDaysPerYear = 365;
inline constexpr int kHoursPerYear = kHoursPerDay * kDaysPerYear;
inline constexpr int kDaysPerWeek = 7;
inline constexpr int kDefaultHorizonYears = 25;

/// Day-of-week index used everywhere: 0 = Monday ... 6 = Sunday.
enum Weekday : int { Monday = 0, Tuesday, Wednesday, Thursday, Friday, Saturday, Sunday };

/// Hourly power series in kW, a whole number of 8760-hour years long.
class HourlySeries {
public:
  HourlySeries() = default;
  explicit HourlySeries(Eigen::ArrayXd values, int start_weekday = Monday);

  const Eigen::ArrayXd& values() const { return values_; }
  int start_weekday() const { return start_weekday_; }
  int years() const { return static_cast<int>(values_.size() / kHoursPerYear); }
  Eigen::Index size() const { return values_.size(); }
  bool empty() const { return values_.size() == 0; }
  double operator[](Eigen::Index i) const { return values_[i]; }
  double sum() const { return values_.sum(); }

  /// Weekday of the slot at `index` counted from hour 0 of the series.
  int weekday_at(Eigen::Index index) const {
    return static_cast<int>((start_weekday_ + index / kHoursPerDay) % kDaysPerWeek);
  }

private:
  Eigen::ArrayXd values_;
  int start_weekday_ = Monday;
};

/// Reads a `timestamp,power_kw` CSV with hourly ISO-8601 timestamps.
/// February 29 rows are skipped so that every year keeps 8760 slots.
HourlySeries ingest_hourly_csv(const std::filesystem::path& path, int expected_year_count);

/// Writes a series in the ingestion format, starting at `first_year`-01-01 00:00.
void write_hourly_csv(const std::filesystem::path& path, const HourlySeries& series, int first_year = 2018);

/// Month lengths of a non-leap year.
inline constexpr std::array<int, 12> kMonthDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

/// Energy per calendar month of the first year of `series` (kWh).
std::array<double, 12> monthly_totals(const HourlySeries& series);

struct PvSynthParams {
  double annual_kwh_per_kwp = 1460.0;
  double seasonal_amplitude = 0.1;
  double noise_level = 0.0;
  std::uint64_t seed = 1;
  /// Day of year (1..365) at which the seasonal envelope peaks.
  double peak_day = 80.0;
  double sunrise_hour = 6.0;
  double sunset_hour = 18.0;
};

/// One year of output for a 1 kWp plant.
HourlySeries synth_pv_profile(const PvSynthParams& params);
HourlySeries synth_pv_profile(double annual_kwh_per_kwp, double seasonal_amplitude, double noise_level,
                              std::uint64_t seed);

struct LoadSynthParams {
  double annual_kwh = 3.0e6;
  double day_night_ratio = 1.8;
  double weekend_factor = 0.6;
  double noise_level = 0.05;
  std::uint64_t seed = 1;
  int day_start_hour = 8;
  int day_end_hour = 18;
};

HourlySeries synth_load_profile(const LoadSynthParams& params);
HourlySeries synth_load_profile(double annual_kwh, double day_night_ratio, double weekend_factor,
                                std::uint64_t seed);

enum class RateBand : std::uint8_t { Peak = 0, Shoulder = 1, OffPeak = 2 };
inline constexpr int kBandCount = 3;

const char* to_string(RateBand band);

using BandCalendar = std::array<std::array<RateBand, kHoursPerDay>, kDaysPerWeek>;
using BandRates = std::array<double, kBandCount>;

class TariffSchedule {
public:
  TariffSchedule(BandCalendar calendar, BandRates first_year_rates, std::vector<double> price_factors);

  /// Time-of-use calendar with three bands over the week, flat price factors.
  static TariffSchedule standard(BandRates first_year_rates = {0.187, 0.107, 0.060},
                                 int horizon_years = kDefaultHorizonYears);
  static BandCalendar standard_calendar();

  RateBand band(int day_of_week, int hour_of_day) const { return calendar_[day_of_week][hour_of_day]; }
  double first_year_rate(RateBand band) const { return rates_[static_cast<int>(band)]; }
  /// k_y for year 1..horizon.
  double price_factor(int year) const;
  double rate(RateBand band, int year) const { return first_year_rate(band) * price_factor(year); }
  int horizon_years() const { return static_cast<int>(factors_.size()); }

  const BandCalendar& calendar() const { return calendar_; }
  const BandRates& first_year_rates() const { return rates_; }
  const std::vector<double>& price_factors() const { return factors_; }

private:
  BandCalendar calendar_;
  BandRates rates_;
  std::vector<double> factors_;
};

struct BandRate {
  RateBand band;
  double rate;
};

BandRate tariff_band_at(const TariffSchedule& schedule, int day_of_week, int hour_of_day);

struct PvPlantConfig {
  HourlySeries base_series;
  double base_kwp = 1.0;
  double depreciation_rate = 0.0055;

  void validate() const;
};

/// Multiplier applied to the base series in `year` for a plant of `new_kwp`.
double pv_scale_factor(const PvPlantConfig& plant, double new_kwp, int year);

/// Output in kW at `hour` (0..8759) of `year` (1..horizon). Base years are tiled.
double scaled_pv_output(const PvPlantConfig& plant, double new_kwp, int year, int hour,
                        int horizon_years = kDefaultHorizonYears);

}  // namespace ressize
