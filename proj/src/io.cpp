#include "gridramp/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gridramp {

namespace {

using nlohmann::json;

constexpr const char* kInstanceFormat = "microgrid-instance";
constexpr const char* kFeederFormat = "feeder-context";
constexpr int kFormatVersion = 1;

// Tracks which keys were consumed so anything left over can be rejected
// with its full path.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node.is_object()) throw ParseError(path_, "expected an object");
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) throw ParseError(path_ + "." + it.key(), "unknown key");
    }
  }

  bool has(const char* key) {
    seen_.insert(key);
    return node_.contains(key) && !node_.at(key).is_null();
  }

  const json& get(const char* key) {
    seen_.insert(key);
    auto it = node_.find(key);
    if (it == node_.end()) throw ParseError(path_ + "." + key, "missing required key");
    return *it;
  }

  double number(const char* key) {
    const json& v = get(key);
    if (!v.is_number()) throw ParseError(path_ + "." + key, "expected a number");
    return v.get<double>();
  }

  int integer(const char* key) {
    const json& v = get(key);
    if (!v.is_number_integer()) throw ParseError(path_ + "." + key, "expected an integer");
    return v.get<int>();
  }

  bool boolean(const char* key) {
    const json& v = get(key);
    if (!v.is_boolean()) throw ParseError(path_ + "." + key, "expected true or false");
    return v.get<bool>();
  }

  std::string text(const char* key) {
    const json& v = get(key);
    if (!v.is_string()) throw ParseError(path_ + "." + key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key) {
    const json& v = get(key);
    if (!v.is_array()) throw ParseError(path_ + "." + key, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_number()) {
        throw ParseError(path_ + "." + key + "[" + std::to_string(k) + "]",
                         "expected a number");
      }
      out.push_back(v[k].get<double>());
    }
    return out;
  }

  const json& array(const char* key) {
    const json& v = get(key);
    if (!v.is_array()) throw ParseError(path_ + "." + key, "expected an array");
    return v;
  }

  const std::string& path() const { return path_; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

json parse_text(const std::string& text, const char* format) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError(format, "document is not valid JSON");
  return doc;
}

void check_header(ObjectReader& root, const char* format) {
  const std::string fmt = root.text("format");
  if (fmt != format) {
    throw ParseError(root.path() + ".format",
                     "expected \"" + std::string(format) + "\", found \"" + fmt + "\"");
  }
  const int version = root.integer("version");
  if (version != kFormatVersion) {
    throw ParseError(root.path() + ".version",
                     "unsupported version " + std::to_string(version));
  }
}

StorageUnit::Mode mode_from_name(const std::string& name, const std::string& path) {
  if (name == "idle") return StorageUnit::Mode::idle;
  if (name == "charging") return StorageUnit::Mode::charging;
  if (name == "discharging") return StorageUnit::Mode::discharging;
  throw ParseError(path, "expected \"idle\", \"charging\", or \"discharging\"");
}

const char* mode_name(StorageUnit::Mode mode) {
  switch (mode) {
    case StorageUnit::Mode::charging: return "charging";
    case StorageUnit::Mode::discharging: return "discharging";
    case StorageUnit::Mode::idle: break;
  }
  return "idle";
}

} // namespace

MicrogridInstance parse_instance(const std::string& text) {
  const json doc = parse_text(text, "instance");
  ObjectReader root(doc, "instance");
  check_header(root, kInstanceFormat);

  MicrogridInstance inst;
  {
    ObjectReader tg(root.get("time_grid"), "time_grid");
    inst.time_grid.periods = tg.integer("periods");
    inst.time_grid.step_hours = tg.number("step_hours");
    tg.finish();
  }

  const json& units = root.array("dispatchable_units");
  for (std::size_t k = 0; k < units.size(); ++k) {
    ObjectReader u(units[k], "dispatchable_units[" + std::to_string(k) + "]");
    DispatchableUnit g;
    g.id = u.text("id");
    g.p_min = u.number("p_min");
    g.p_max = u.number("p_max");
    g.marginal_cost = u.number("marginal_cost");
    g.no_load_cost = u.number("no_load_cost");
    g.startup_cost = u.number("startup_cost");
    g.shutdown_cost = u.number("shutdown_cost");
    g.ramp_up = u.number("ramp_up");
    g.ramp_down = u.number("ramp_down");
    g.min_up = u.integer("min_up");
    g.min_down = u.integer("min_down");
    g.initial_committed = u.boolean("initial_committed");
    g.initial_power = u.number("initial_power");
    g.initial_state_duration = u.integer("initial_state_duration");
    u.finish();
    inst.dispatchable_units.push_back(std::move(g));
  }

  const json& stores = root.array("storage_units");
  for (std::size_t k = 0; k < stores.size(); ++k) {
    ObjectReader u(stores[k], "storage_units[" + std::to_string(k) + "]");
    StorageUnit s;
    s.id = u.text("id");
    s.p_dch_min = u.number("p_dch_min");
    s.p_dch_max = u.number("p_dch_max");
    s.p_ch_min = u.number("p_ch_min");
    s.p_ch_max = u.number("p_ch_max");
    s.cap_min = u.number("cap_min");
    s.cap_max = u.number("cap_max");
    s.efficiency = u.number("efficiency");
    s.initial_energy = u.number("initial_energy");
    s.min_charge_time = u.integer("min_charge_time");
    s.min_discharge_time = u.integer("min_discharge_time");
    s.initial_mode = mode_from_name(u.text("initial_mode"),
                                    u.path() + ".initial_mode");
    s.initial_mode_duration = u.integer("initial_mode_duration");
    u.finish();
    inst.storage_units.push_back(std::move(s));
  }

  const json& loads = root.array("adjustable_loads");
  for (std::size_t k = 0; k < loads.size(); ++k) {
    ObjectReader u(loads[k], "adjustable_loads[" + std::to_string(k) + "]");
    AdjustableLoad d;
    d.id = u.text("id");
    d.d_min = u.numbers("d_min");
    d.d_max = u.numbers("d_max");
    d.energy = u.number("energy");
    d.window_start = u.integer("window_start");
    d.window_end = u.integer("window_end");
    d.min_on = u.integer("min_on");
    d.initial_operating = u.boolean("initial_operating");
    d.initial_on_duration = u.integer("initial_on_duration");
    u.finish();
    inst.adjustable_loads.push_back(std::move(d));
  }

  {
    ObjectReader fp(root.get("fixed_profiles"), "fixed_profiles");
    inst.fixed_profiles.fixed_load = fp.numbers("fixed_load");
    inst.fixed_profiles.nondispatchable_gen = fp.numbers("nondispatchable_gen");
    fp.finish();
  }
  {
    ObjectReader gl(root.get("grid_link"), "grid_link");
    inst.grid_link.transfer_limit = gl.number("transfer_limit");
    if (gl.has("initial_exchange")) {
      inst.grid_link.initial_exchange = gl.number("initial_exchange");
    }
    inst.grid_link.market_price = gl.numbers("market_price");
    gl.finish();
  }
  root.finish();
  return inst;
}

std::string serialize_instance(const MicrogridInstance& inst) {
  json doc;
  doc["format"] = kInstanceFormat;
  doc["version"] = kFormatVersion;
  doc["time_grid"] = {{"periods", inst.time_grid.periods},
                      {"step_hours", inst.time_grid.step_hours}};

  doc["dispatchable_units"] = json::array();
  for (const auto& g : inst.dispatchable_units) {
    doc["dispatchable_units"].push_back({{"id", g.id},
                                         {"p_min", g.p_min},
                                         {"p_max", g.p_max},
                                         {"marginal_cost", g.marginal_cost},
                                         {"no_load_cost", g.no_load_cost},
                                         {"startup_cost", g.startup_cost},
                                         {"shutdown_cost", g.shutdown_cost},
                                         {"ramp_up", g.ramp_up},
                                         {"ramp_down", g.ramp_down},
                                         {"min_up", g.min_up},
                                         {"min_down", g.min_down},
                                         {"initial_committed", g.initial_committed},
                                         {"initial_power", g.initial_power},
                                         {"initial_state_duration", g.initial_state_duration}});
  }

  doc["storage_units"] = json::array();
  for (const auto& s : inst.storage_units) {
    doc["storage_units"].push_back({{"id", s.id},
                                    {"p_dch_min", s.p_dch_min},
                                    {"p_dch_max", s.p_dch_max},
                                    {"p_ch_min", s.p_ch_min},
                                    {"p_ch_max", s.p_ch_max},
                                    {"cap_min", s.cap_min},
                                    {"cap_max", s.cap_max},
                                    {"efficiency", s.efficiency},
                                    {"initial_energy", s.initial_energy},
                                    {"min_charge_time", s.min_charge_time},
                                    {"min_discharge_time", s.min_discharge_time},
                                    {"initial_mode", mode_name(s.initial_mode)},
                                    {"initial_mode_duration", s.initial_mode_duration}});
  }

  doc["adjustable_loads"] = json::array();
  for (const auto& d : inst.adjustable_loads) {
    doc["adjustable_loads"].push_back({{"id", d.id},
                                       {"d_min", d.d_min},
                                       {"d_max", d.d_max},
                                       {"energy", d.energy},
                                       {"window_start", d.window_start},
                                       {"window_end", d.window_end},
                                       {"min_on", d.min_on},
                                       {"initial_operating", d.initial_operating},
                                       {"initial_on_duration", d.initial_on_duration}});
  }

  doc["fixed_profiles"] = {{"fixed_load", inst.fixed_profiles.fixed_load},
                           {"nondispatchable_gen", inst.fixed_profiles.nondispatchable_gen}};

  doc["grid_link"] = {{"transfer_limit", inst.grid_link.transfer_limit},
                      {"market_price", inst.grid_link.market_price}};
  if (inst.grid_link.initial_exchange) {
    doc["grid_link"]["initial_exchange"] = *inst.grid_link.initial_exchange;
  }

  return doc.dump(2) + "\n";
}

FeederContext parse_feeder(const std::string& text) {
  const json doc = parse_text(text, "feeder");
  ObjectReader root(doc, "feeder");
  check_header(root, kFeederFormat);

  FeederContext feeder;
  feeder.customer_net_load = root.numbers("customer_net_load");
  if (root.has("ramp_target")) feeder.ramp_target = root.numbers("ramp_target");
  root.finish();
  return feeder;
}

std::string serialize_feeder(const FeederContext& feeder) {
  json doc;
  doc["format"] = kFeederFormat;
  doc["version"] = kFormatVersion;
  doc["customer_net_load"] = feeder.customer_net_load;
  if (!feeder.ramp_target.empty()) doc["ramp_target"] = feeder.ramp_target;
  return doc.dump(2) + "\n";
}

MicrogridInstance load_instance(const std::string& path) {
  return parse_instance(read_file(path));
}

FeederContext load_feeder(const std::string& path) { return parse_feeder(read_file(path)); }

namespace {

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s = buf;
  if (s[0] == '-' && s.find_first_not_of("0.", 1) == std::string::npos) {
    s.erase(0, 1); // "-0.000000" reads as a real sign; normalize it away
  }
  return s;
}

} // namespace

const char* status_name(MILPStatus status) {
  switch (status) {
    case MILPStatus::optimal: return "optimal";
    case MILPStatus::feasible: return "feasible";
    case MILPStatus::infeasible: return "infeasible";
    case MILPStatus::unbounded: return "unbounded";
    case MILPStatus::limit_reached: break;
  }
  return "limit";
}

std::string schedule_csv(const Schedule& s) {
  std::ostringstream os;
  os << "period";
  for (const auto& u : s.units) {
    os << ",P[" << u.id << "],I[" << u.id << "],SU[" << u.id << "],SD[" << u.id << "]";
  }
  for (const auto& st : s.storage) {
    os << ",Pdch[" << st.id << "],Pch[" << st.id << "],u[" << st.id << "],v[" << st.id
       << "],C[" << st.id << "]";
  }
  for (const auto& d : s.loads) {
    os << ",D[" << d.id << "],z[" << d.id << "]";
  }
  os << ",PM\n";

  for (int t = 1; t <= s.periods; ++t) {
    const std::size_t k = static_cast<std::size_t>(t) - 1;
    os << t;
    for (const auto& u : s.units) {
      os << ',' << fmt6(u.power[k]) << ',' << u.committed[k] << ',' << fmt6(u.startup[k])
         << ',' << fmt6(u.shutdown[k]);
    }
    for (const auto& st : s.storage) {
      os << ',' << fmt6(st.discharge[k]) << ',' << fmt6(st.charge[k]) << ','
         << st.discharging[k] << ',' << st.charging[k] << ',' << fmt6(st.energy[k]);
    }
    for (const auto& d : s.loads) {
      os << ',' << fmt6(d.power[k]) << ',' << d.operating[k];
    }
    os << ',' << fmt6(s.exchange[k]) << '\n';
  }
  return os.str();
}

std::string utility_profile_csv(const UtilityProfile& profile) {
  std::ostringstream os;
  os << "period,utility_net,ramp\n";
  for (std::size_t k = 0; k < profile.net.size(); ++k) {
    os << (k + 1) << ',' << fmt6(profile.net[k]) << ',';
    if (k > 0) os << fmt6(profile.ramp[k - 1]);
    os << '\n';
  }
  return os.str();
}

std::string capability_csv(const CapabilityResult& result) {
  std::ostringstream os;
  os << "period,swing_up,swing_down\n";
  for (std::size_t k = 0; k < result.periods.size(); ++k) {
    os << result.periods[k] << ',' << fmt6(result.up[k]) << ',' << fmt6(result.down[k])
       << '\n';
  }
  return os.str();
}

std::string capacity_sweep_csv(const SweepCurve& curve) {
  std::ostringstream os;
  os << "line_capacity,capability,cost,status\n";
  for (const auto& p : curve.points) {
    os << fmt6(p.parameter) << ',' << fmt6(p.capability) << ',' << fmt6(p.cost) << ','
       << status_name(p.status) << '\n';
  }
  return os.str();
}

std::string ramp_sweep_csv(const SweepCurve& curve) {
  std::ostringstream os;
  os << "ramp_target,cost,status\n";
  for (const auto& p : curve.points) {
    os << fmt6(p.parameter) << ',' << fmt6(p.cost) << ',' << status_name(p.status) << '\n';
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace gridramp
