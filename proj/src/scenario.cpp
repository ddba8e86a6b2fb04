#include "ressize/scenario.hpp"

#include "ressize/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace ressize {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::string join_path(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

/// Object view that records which keys were read so leftovers can be rejected.
class Section {
public:
  Section(const json* node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_->is_object()) throw ConfigError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  bool present() const { return node_ != nullptr; }
  bool has(const std::string& key) const { return node_ && node_->contains(key); }

  const json* raw(const std::string& key) {
    if (!has(key)) return nullptr;
    used_.insert(key);
    return &node_->at(key);
  }

  Section child(const std::string& key) { return Section(raw(key), join_path(path_, key)); }

  double number(const std::string& key, double fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(join_path(path_, key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ConfigError(join_path(path_, key), "must be finite");
    return d;
  }

  long long integer(const std::string& key, long long fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(join_path(path_, key), "expected an integer");
    return v->get<long long>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_number_unsigned()) throw ConfigError(join_path(path_, key), "expected a non-negative integer");
    return v->get<std::uint64_t>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(join_path(path_, key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = raw(key);
    if (!v) return {};
    if (!v->is_array()) throw ConfigError(join_path(path_, key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& e = (*v)[i];
      if (!e.is_number()) throw ConfigError(fmt::format("{}[{}]", join_path(path_, key), i), "expected a number");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Range range(const std::string& key, Range fallback) {
    const std::string p = join_path(path_, key);
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
      throw ConfigError(p, "expected [lower, upper]");
    Range r{(*v)[0].get<double>(), (*v)[1].get<double>()};
    if (!(r.lower >= 0.0 && r.lower <= r.upper && std::isfinite(r.upper)))
      throw ConfigError(p, "bounds must satisfy 0 <= lower <= upper");
    return r;
  }

  /// Rejects keys that were never read.
  void finish() const {
    if (!node_) return;
    for (const auto& [key, value] : node_->items())
      if (!used_.count(key)) throw ConfigError(join_path(path_, key), "unknown key");
  }

private:
  const json* node_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename Fn>
auto wrap(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const DataError& e) {
    throw ConfigError(path, e.what());
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

struct PvPreset {
  double annual_kwh_per_kwp, amplitude, peak_day, noise;
};

PvPreset pv_preset(const std::string& name, const std::string& path) {
  if (name == "tropical") return {1500.0, 0.1, 80.0, 0.15};
  if (name == "subtropical") return {1350.0, 0.8, 355.0, 0.15};
  throw ConfigError(path, fmt::format("unknown preset '{}' (tropical|subtropical)", name));
}

struct PvResolved {
  PvPlantConfig plant;
  ojson echo;
};

PvResolved read_pv(Section s, const std::filesystem::path& base_dir) {
  PvResolved r;
  const std::string source = s.text("source", "synthetic");
  r.echo["source"] = source;
  if (source == "synthetic") {
    const std::string preset_name = s.text("preset", "tropical");
    const PvPreset preset = pv_preset(preset_name, join_path(s.path(), "preset"));
    PvSynthParams p;
    p.annual_kwh_per_kwp = s.number("annual_kwh_per_kwp", preset.annual_kwh_per_kwp);
    p.seasonal_amplitude = s.number("seasonal_amplitude", preset.amplitude);
    p.peak_day = s.number("peak_day", preset.peak_day);
    p.noise_level = s.number("noise_level", preset.noise);
    p.seed = s.unsigned_integer("seed", 1);
    p.sunrise_hour = s.number("sunrise_hour", p.sunrise_hour);
    p.sunset_hour = s.number("sunset_hour", p.sunset_hour);
    r.plant.base_kwp = s.number("base_kwp", 1000.0);
    const auto series = wrap(s.path(), [&] { return synth_pv_profile(p); });
    r.plant.base_series = HourlySeries(series.values() * r.plant.base_kwp, series.start_weekday());
    r.echo["preset"] = preset_name;
    r.echo["annual_kwh_per_kwp"] = p.annual_kwh_per_kwp;
    r.echo["seasonal_amplitude"] = p.seasonal_amplitude;
    r.echo["peak_day"] = p.peak_day;
    r.echo["noise_level"] = p.noise_level;
    r.echo["seed"] = p.seed;
    r.echo["sunrise_hour"] = p.sunrise_hour;
    r.echo["sunset_hour"] = p.sunset_hour;
  } else if (source == "csv") {
    if (!s.has("path")) throw ConfigError(join_path(s.path(), "path"), "required for csv source");
    if (!s.has("base_kwp")) throw ConfigError(join_path(s.path(), "base_kwp"), "required for csv source");
    const std::string path = s.text("path", "");
    const long long years = s.integer("years", 1);
    if (years < 1) throw ConfigError(join_path(s.path(), "years"), "must be at least 1");
    r.plant.base_kwp = s.number("base_kwp", 1.0);
    r.plant.base_series =
        wrap(join_path(s.path(), "path"), [&] { return ingest_hourly_csv(resolve(base_dir, path), static_cast<int>(years)); });
    r.echo["path"] = path;
    r.echo["years"] = years;
  } else {
    throw ConfigError(join_path(s.path(), "source"), "expected 'synthetic' or 'csv'");
  }
  r.plant.depreciation_rate = s.number("depreciation_rate", r.plant.depreciation_rate);
  r.echo["base_kwp"] = r.plant.base_kwp;
  r.echo["depreciation_rate"] = r.plant.depreciation_rate;
  s.finish();
  wrap(s.path(), [&] {
    r.plant.validate();
    return 0;
  });
  return r;
}

HourlySeries read_load(Section s, const std::filesystem::path& base_dir, ojson& echo) {
  const std::string source = s.text("source", "synthetic");
  echo["source"] = source;
  HourlySeries out;
  if (source == "synthetic") {
    LoadSynthParams p;
    p.annual_kwh = s.number("annual_kwh", p.annual_kwh);
    p.day_night_ratio = s.number("day_night_ratio", p.day_night_ratio);
    p.weekend_factor = s.number("weekend_factor", p.weekend_factor);
    p.noise_level = s.number("noise_level", p.noise_level);
    p.seed = s.unsigned_integer("seed", p.seed);
    p.day_start_hour = static_cast<int>(s.integer("day_start_hour", p.day_start_hour));
    p.day_end_hour = static_cast<int>(s.integer("day_end_hour", p.day_end_hour));
    out = wrap(s.path(), [&] { return synth_load_profile(p); });
    echo["annual_kwh"] = p.annual_kwh;
    echo["day_night_ratio"] = p.day_night_ratio;
    echo["weekend_factor"] = p.weekend_factor;
    echo["noise_level"] = p.noise_level;
    echo["seed"] = p.seed;
    echo["day_start_hour"] = p.day_start_hour;
    echo["day_end_hour"] = p.day_end_hour;
  } else if (source == "csv") {
    if (!s.has("path")) throw ConfigError(join_path(s.path(), "path"), "required for csv source");
    const std::string path = s.text("path", "");
    const long long years = s.integer("years", 1);
    if (years < 1) throw ConfigError(join_path(s.path(), "years"), "must be at least 1");
    out = wrap(join_path(s.path(), "path"),
               [&] { return ingest_hourly_csv(resolve(base_dir, path), static_cast<int>(years)); });
    echo["path"] = path;
    echo["years"] = years;
  } else {
    throw ConfigError(join_path(s.path(), "source"), "expected 'synthetic' or 'csv'");
  }
  s.finish();
  return out;
}

TariffSchedule read_tariff(Section s, int horizon, ojson& echo) {
  BandRates rates{0.187, 0.107, 0.060};
  Section r = s.child("rates");
  rates[0] = r.number("peak", rates[0]);
  rates[1] = r.number("shoulder", rates[1]);
  rates[2] = r.number("off_peak", rates[2]);
  r.finish();
  std::vector<double> factors = s.numbers("price_factors");
  if (factors.empty()) factors.assign(static_cast<std::size_t>(horizon), 1.0);
  if (static_cast<int>(factors.size()) < horizon)
    throw ConfigError(join_path(s.path(), "price_factors"),
                      fmt::format("{} factors given for a {}-year horizon", factors.size(), horizon));
  s.finish();
  echo["rates"] = {{"peak", rates[0]}, {"shoulder", rates[1]}, {"off_peak", rates[2]}};
  echo["price_factors"] = factors;
  return wrap(s.path(), [&] { return TariffSchedule(TariffSchedule::standard_calendar(), rates, factors); });
}

BatteryTechnology read_battery(Section s, ojson& echo) {
  BatteryTechnology b;
  b.ep_ratio = s.number("ep_ratio", b.ep_ratio);
  b.initial_efficiency = s.number("initial_efficiency", b.initial_efficiency);
  b.annual_fade = s.number("annual_fade", b.annual_fade);
  b.lifetime = static_cast<int>(s.integer("lifetime_years", b.lifetime));
  b.initial_soc = s.number("initial_soc", b.initial_soc);
  s.finish();
  echo = {{"ep_ratio", b.ep_ratio},
          {"initial_efficiency", b.initial_efficiency},
          {"annual_fade", b.annual_fade},
          {"lifetime_years", b.lifetime},
          {"initial_soc", b.initial_soc}};
  return b;
}

StackTechnology read_stack(Section s, StackKind kind, StackTechnology fallback,
                           const std::filesystem::path& base_dir, ojson& echo) {
  StackTechnology t = fallback;
  t.drift = s.number("drift_v_per_h", t.drift);
  Section c = s.child("curve");
  if (c.present()) {
    const bool from_csv = c.has("csv");
    const bool from_points = c.has("currents") || c.has("voltages");
    if (from_csv == from_points) throw ConfigError(c.path(), "give either 'csv' or 'currents' and 'voltages'");
    if (from_csv) {
      const std::string p = c.text("csv", "");
      t.curve = std::make_shared<const PolarizationCurve>(
          wrap(join_path(c.path(), "csv"), [&] { return load_polarization_csv(resolve(base_dir, p), kind); }));
    } else {
      const auto is = c.numbers("currents");
      const auto vs = c.numbers("voltages");
      t.curve = std::make_shared<const PolarizationCurve>(wrap(c.path(), [&] {
        return PolarizationCurve(kind, Eigen::Map<const Eigen::ArrayXd>(is.data(), static_cast<Eigen::Index>(is.size())),
                                 Eigen::Map<const Eigen::ArrayXd>(vs.data(), static_cast<Eigen::Index>(vs.size())));
      }));
    }
    c.finish();
  }
  s.finish();
  const auto& cur = t.curve->currents();
  const auto& vol = t.curve->voltages();
  echo = {{"drift_v_per_h", t.drift},
          {"curve",
           {{"currents", std::vector<double>(cur.data(), cur.data() + cur.size())},
            {"voltages", std::vector<double>(vol.data(), vol.data() + vol.size())}}}};
  return t;
}

const char* component_key(Component c) { return to_string(c); }

void read_costbook(Section s, CostBook& book, ojson& echo) {
  for (Component c : kAllComponents) {
    Section cs = s.child(component_key(c));
    ComponentCost& cost = book.components[c];
    cost.unit_cost = cs.number("unit_cost", cost.unit_cost);
    cost.om_factor = cs.number("om_factor", cost.om_factor);
    if (const json* reps = cs.raw("replacements")) {
      const std::string p = join_path(cs.path(), "replacements");
      if (!reps->is_array()) throw ConfigError(p, "expected an array of [year, factor] pairs");
      cost.replacements.clear();
      for (std::size_t i = 0; i < reps->size(); ++i) {
        const auto& e = (*reps)[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number())
          throw ConfigError(fmt::format("{}[{}]", p, i), "expected [year, factor]");
        cost.replacements.push_back({e[0].get<int>(), e[1].get<double>()});
      }
    }
    cs.finish();
    ojson reps = ojson::array();
    for (const auto& r : cost.replacements) reps.push_back({r.year, r.factor});
    echo[component_key(c)] = {{"unit_cost", cost.unit_cost}, {"om_factor", cost.om_factor}, {"replacements", reps}};
  }
  s.finish();
}

std::optional<SystemSizing> sizing_from_pairs(const std::vector<std::pair<std::string, double>>& pairs,
                                              double inverter_efficiency, const std::string& path) {
  SystemSizing s;
  s.inverter_efficiency = inverter_efficiency;
  bool battery = false, hydrogen = false;
  double battery_kwh = 0.0;
  HydrogenSizing h;
  for (const auto& [key, value] : pairs) {
    const std::string p = join_path(path, key);
    if (key == "pv_kwp") {
      s.pv_kwp = value;
    } else if (key == "battery_kwh") {
      battery_kwh = value;
      battery = true;
    } else if (key == "el_kw") {
      h.el_kw = value;
      hydrogen = true;
    } else if (key == "tank_kg") {
      h.tank_kg = value;
      hydrogen = true;
    } else if (key == "fc_kw") {
      h.fc_kw = value;
      hydrogen = true;
    } else {
      throw ConfigError(p, "unknown sizing key (pv_kwp, battery_kwh, el_kw, tank_kg, fc_kw)");
    }
  }
  if (battery && hydrogen) throw ConfigError(path, "battery and hydrogen sizes cannot be mixed");
  if (hydrogen)
    s.storage = h;
  else
    s.storage = BatterySizing{battery_kwh};
  s.validate();
  return s;
}

ojson sizing_echo(const SystemSizing& s) {
  ojson o;
  o["pv_kwp"] = s.pv_kwp;
  if (const auto* b = std::get_if<BatterySizing>(&s.storage)) {
    o["battery_kwh"] = b->battery_kwh;
  } else {
    const auto& h = std::get<HydrogenSizing>(s.storage);
    o["el_kw"] = h.el_kw;
    o["tank_kg"] = h.tank_kg;
    o["fc_kw"] = h.fc_kw;
  }
  return o;
}

WindowPoint read_window_point(Section s, WindowPoint fallback) {
  WindowPoint p = fallback;
  p.day_of_year = static_cast<int>(s.integer("day", p.day_of_year));
  p.hour = static_cast<int>(s.integer("hour", p.hour));
  s.finish();
  return p;
}

double parse_number(const std::string& text, const std::string& path) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(path, fmt::format("'{}' is not a number", text));
  }
  if (used != text.size()) throw ConfigError(path, fmt::format("'{}' is not a number", text));
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void hash_bytes(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

std::string fnv1a_hex(const void* data, std::size_t size, std::uint64_t seed) {
  std::uint64_t h = seed;
  hash_bytes(h, data, size);
  return fmt::format("{:016x}", h);
}

SimulationInputs Scenario::inputs_for(CostScenario s) const {
  SimulationInputs in = inputs;
  const CostBook& book = costbook(s);
  in.battery_replacements = book.replacement_years(Component::Battery);
  in.electrolyser_replacements = book.replacement_years(Component::Electrolyser);
  in.fuel_cell_replacements = book.replacement_years(Component::FuelCell);
  return in;
}

Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", fmt::format("scenario is not valid JSON: {}", e.what()));
  }
  Section root(&doc, "");
  Scenario sc;
  ojson echo;

  const long long horizon = root.integer("horizon_years", kDefaultHorizonYears);
  if (horizon < 1 || horizon > 100) throw ConfigError("horizon_years", "must lie in 1..100");
  sc.inputs.horizon_years = static_cast<int>(horizon);
  sc.inverter_efficiency = root.number("inverter_efficiency", sc.inverter_efficiency);
  if (!(sc.inverter_efficiency > 0.0 && sc.inverter_efficiency <= 1.0))
    throw ConfigError("inverter_efficiency", "must lie in (0, 1]");
  const std::string description = root.text("description", "");
  echo["horizon_years"] = horizon;
  echo["inverter_efficiency"] = sc.inverter_efficiency;

  Section profiles = root.child("profiles");
  {
    auto pv = read_pv(profiles.child("pv"), base_dir);
    sc.inputs.pv = std::move(pv.plant);
    ojson load_echo;
    sc.inputs.load = read_load(profiles.child("load"), base_dir, load_echo);
    profiles.finish();
    echo["profiles"] = {{"pv", pv.echo}, {"load", load_echo}};
  }

  ojson tariff_echo;
  sc.inputs.tariff = read_tariff(root.child("tariff"), sc.inputs.horizon_years, tariff_echo);
  echo["tariff"] = tariff_echo;

  ojson battery_echo;
  sc.inputs.battery = read_battery(root.child("battery"), battery_echo);
  echo["battery"] = battery_echo;

  {
    Section h = root.child("hydrogen");
    HydrogenTechnology tech;
    ojson el_echo, fc_echo;
    tech.electrolyser =
        read_stack(h.child("electrolyser"), StackKind::Electrolyser, tech.electrolyser, base_dir, el_echo);
    tech.fuel_cell = read_stack(h.child("fuel_cell"), StackKind::FuelCell, tech.fuel_cell, base_dir, fc_echo);
    tech.initial_fill = h.number("initial_fill", tech.initial_fill);
    h.finish();
    sc.inputs.hydrogen = tech;
    echo["hydrogen"] = {{"electrolyser", el_echo}, {"fuel_cell", fc_echo}, {"initial_fill", tech.initial_fill}};
  }

  {
    Section e = root.child("economics");
    const double rate = e.number("discount_rate", 0.05);
    const std::string basis = e.text("battery_cost_basis", "per_kwh");
    if (basis != "per_kwh" && basis != "per_kw")
      throw ConfigError("economics.battery_cost_basis", "expected 'per_kwh' or 'per_kw'");
    ojson cur_echo, ult_echo;
    read_costbook(e.child("current"), sc.current, cur_echo);
    read_costbook(e.child("ultimate"), sc.ultimate, ult_echo);
    e.finish();
    for (CostBook* b : {&sc.current, &sc.ultimate}) {
      b->discount_rate = rate;
      b->battery_basis = basis == "per_kw" ? BatteryCostBasis::PerKw : BatteryCostBasis::PerKwh;
      b->validate(sc.inputs.horizon_years);
    }
    echo["economics"] = {
        {"discount_rate", rate}, {"battery_cost_basis", basis}, {"current", cur_echo}, {"ultimate", ult_echo}};
  }

  if (const json* sz = root.raw("sizing")) {
    if (!sz->is_object()) throw ConfigError("sizing", "expected an object");
    std::vector<std::pair<std::string, double>> pairs;
    for (const auto& [k, v] : sz->items()) {
      if (!v.is_number()) throw ConfigError(join_path("sizing", k), "expected a number");
      pairs.emplace_back(k, v.get<double>());
    }
    sc.sizing = sizing_from_pairs(pairs, sc.inverter_efficiency, "sizing");
    echo["sizing"] = sizing_echo(*sc.sizing);
  }

  {
    Section s = root.child("strategy");
    const std::string mode = s.text("mode", "cs");
    if (mode == "cs")
      sc.strategy.mode = StrategyMode::Conventional;
    else if (mode == "olds")
      sc.strategy.mode = StrategyMode::Olds;
    else
      throw ConfigError("strategy.mode", "expected 'cs' or 'olds'");
    sc.strategy.window_start = read_window_point(s.child("window_start"), sc.strategy.window_start);
    sc.strategy.window_end = read_window_point(s.child("window_end"), sc.strategy.window_end);
    sc.strategy.limit_sunny = s.number("limit_sunny", 0.0);
    sc.strategy.limit_cloudy = s.number("limit_cloudy", 0.0);
    s.finish();
    sc.strategy.validate();
    echo["strategy"] = {{"mode", mode},
                        {"window_start", {{"day", sc.strategy.window_start.day_of_year}, {"hour", sc.strategy.window_start.hour}}},
                        {"window_end", {{"day", sc.strategy.window_end.day_of_year}, {"hour", sc.strategy.window_end.hour}}},
                        {"limit_sunny", sc.strategy.limit_sunny},
                        {"limit_cloudy", sc.strategy.limit_cloudy}};
  }

  {
    Section b = root.child("bounds");
    SizingBounds& sb = sc.bounds;
    sb.pv_kwp = b.range("pv_kwp", sb.pv_kwp);
    sb.battery_kwh = b.range("battery_kwh", sb.battery_kwh);
    sb.el_kw = b.range("el_kw", sb.el_kw);
    sb.tank_kg = b.range("tank_kg", sb.tank_kg);
    sb.fc_kw = b.range("fc_kw", sb.fc_kw);
    sb.limit_sunny = b.range("limit_sunny", sb.limit_sunny);
    sb.limit_cloudy = b.range("limit_cloudy", sb.limit_cloudy);
    b.finish();
    if (sb.limit_sunny.upper > 1.0) throw ConfigError("bounds.limit_sunny", "upper bound above 1");
    if (sb.limit_cloudy.upper > 1.0) throw ConfigError("bounds.limit_cloudy", "upper bound above 1");
    auto r = [](const Range& x) { return ojson::array({x.lower, x.upper}); };
    echo["bounds"] = {{"pv_kwp", r(sb.pv_kwp)},       {"battery_kwh", r(sb.battery_kwh)},
                      {"el_kw", r(sb.el_kw)},         {"tank_kg", r(sb.tank_kg)},
                      {"fc_kw", r(sb.fc_kw)},         {"limit_sunny", r(sb.limit_sunny)},
                      {"limit_cloudy", r(sb.limit_cloudy)}};
  }

  {
    Section o = root.child("optimizer");
    OptimizerSettings& os = sc.optimizer;
    const long long budget = o.integer("budget", static_cast<long long>(os.budget));
    if (budget < 1) throw ConfigError("optimizer.budget", "must be at least 1");
    os.budget = static_cast<std::size_t>(budget);
    os.seed = o.unsigned_integer("seed", os.seed);
    os.min_ssr = o.number("min_ssr", os.min_ssr);
    if (!(os.min_ssr >= 0.0 && os.min_ssr <= 1.0)) throw ConfigError("optimizer.min_ssr", "must lie in [0, 1]");
    const long long population = o.integer("population", os.momfa.population);
    const long long capacity = o.integer("archive_capacity", static_cast<long long>(os.momfa.archive_capacity));
    const long long threads = o.integer("threads", os.momfa.threads);
    if (population < 1) throw ConfigError("optimizer.population", "must be at least 1");
    if (capacity < 1) throw ConfigError("optimizer.archive_capacity", "must be at least 1");
    if (threads < 1) throw ConfigError("optimizer.threads", "must be at least 1");

    Section m = o.child("momfa");
    os.momfa.population = static_cast<int>(population);
    os.momfa.max_iterations = static_cast<int>(m.integer("max_iterations", os.momfa.max_iterations));
    os.momfa.beta0 = m.number("beta0", os.momfa.beta0);
    os.momfa.gamma = m.number("gamma", os.momfa.gamma);
    os.momfa.alpha0 = m.number("alpha0", os.momfa.alpha0);
    os.momfa.theta = m.number("theta", os.momfa.theta);
    os.momfa.eta = m.number("eta", os.momfa.eta);
    os.momfa.tau = m.number("tau", os.momfa.tau);
    os.momfa.archive_capacity = static_cast<std::size_t>(capacity);
    os.momfa.threads = static_cast<int>(threads);
    os.momfa.seed = os.seed;
    m.finish();
    wrap("optimizer.momfa", [&] {
      os.momfa.validate();
      return 0;
    });

    Section g = o.child("nsga2");
    os.nsga2.population = static_cast<int>(population);
    os.nsga2.crossover_probability = g.number("crossover_probability", os.nsga2.crossover_probability);
    os.nsga2.eta_c = g.number("eta_c", os.nsga2.eta_c);
    os.nsga2.eta_m = g.number("eta_m", os.nsga2.eta_m);
    os.nsga2.mutation_rate = g.number("mutation_rate", os.nsga2.mutation_rate);
    os.nsga2.archive_capacity = static_cast<std::size_t>(capacity);
    os.nsga2.threads = static_cast<int>(threads);
    os.nsga2.seed = os.seed;
    g.finish();
    wrap("optimizer.nsga2", [&] {
      os.nsga2.validate();
      return 0;
    });
    o.finish();
    echo["optimizer"] = {{"budget", os.budget},
                         {"seed", os.seed},
                         {"min_ssr", os.min_ssr},
                         {"population", population},
                         {"archive_capacity", capacity},
                         {"momfa",
                          {{"max_iterations", os.momfa.max_iterations},
                           {"beta0", os.momfa.beta0},
                           {"gamma", os.momfa.gamma},
                           {"alpha0", os.momfa.alpha0},
                           {"theta", os.momfa.theta},
                           {"eta", os.momfa.eta},
                           {"tau", os.momfa.tau}}},
                         {"nsga2",
                          {{"crossover_probability", os.nsga2.crossover_probability},
                           {"eta_c", os.nsga2.eta_c},
                           {"eta_m", os.nsga2.eta_m},
                           {"mutation_rate", os.nsga2.mutation_rate}}}};
  }
  root.finish();
  (void)description;

  sc.inputs_for(CostScenario::Current).validate();
  sc.inputs_for(CostScenario::Ultimate).validate();

  // Thread count is a resource setting, not a model parameter, so it stays out of the digest.
  sc.resolved_json = echo.dump(2);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  hash_bytes(h, sc.resolved_json.data(), sc.resolved_json.size());
  const auto& pv = sc.inputs.pv.base_series.values();
  hash_bytes(h, pv.data(), static_cast<std::size_t>(pv.size()) * sizeof(double));
  const int pv_weekday = sc.inputs.pv.base_series.start_weekday();
  hash_bytes(h, &pv_weekday, sizeof pv_weekday);
  const auto& load = sc.inputs.load.values();
  hash_bytes(h, load.data(), static_cast<std::size_t>(load.size()) * sizeof(double));
  const int load_weekday = sc.inputs.load.start_weekday();
  hash_bytes(h, &load_weekday, sizeof load_weekday);
  sc.digest = fmt::format("{:016x}", h);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", fmt::format("cannot open scenario file {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.parent_path());
}

Scenario default_scenario() { return parse_scenario("{}", std::filesystem::current_path()); }

SystemSizing parse_sizing(const std::string& spec, double inverter_efficiency) {
  const std::string text = trim(spec);
  if (text.empty()) throw ConfigError("sizing", "empty sizing");
  std::vector<std::pair<std::string, double>> pairs;
  auto add = [&](const std::string& key, const std::string& value) {
    const std::string k = trim(key);
    pairs.emplace_back(k, parse_number(trim(value), join_path("sizing", k)));
  };

  if (text.find('=') != std::string::npos && text.find('\n') == std::string::npos &&
      !std::filesystem::exists(text)) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (trim(item).empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("sizing", fmt::format("expected key=value, got '{}'", item));
      add(item.substr(0, eq), item.substr(eq + 1));
    }
    return *sizing_from_pairs(pairs, inverter_efficiency, "sizing");
  }

  std::ifstream in(text);
  if (!in) throw ConfigError("sizing", fmt::format("cannot open sizing file {}", text));
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string body = trim(buf.str());
  if (!body.empty() && body.front() == '{') {
    json doc;
    try {
      doc = json::parse(body);
    } catch (const json::parse_error& e) {
      throw ConfigError("sizing", fmt::format("invalid JSON: {}", e.what()));
    }
    for (const auto& [k, v] : doc.items()) {
      if (!v.is_number()) throw ConfigError(join_path("sizing", k), "expected a number");
      pairs.emplace_back(k, v.get<double>());
    }
    return *sizing_from_pairs(pairs, inverter_efficiency, "sizing");
  }
  // Table form: one `key,value` or `key=value` per line; '#' comments and a `name,value` header allowed.
  std::stringstream lines(body);
  std::string line;
  while (std::getline(lines, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto sep = line.find_first_of(",=");
    if (sep == std::string::npos) throw ConfigError("sizing", fmt::format("expected key,value, got '{}'", line));
    const std::string key = trim(line.substr(0, sep));
    if (key == "name" || key == "component") continue;
    add(key, line.substr(sep + 1));
  }
  return *sizing_from_pairs(pairs, inverter_efficiency, "sizing");
}

}  // namespace ressize
