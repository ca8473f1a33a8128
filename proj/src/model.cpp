#include "gridramp/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace gridramp {

namespace {

std::string at(const std::string& section, std::size_t index, const std::string& field) {
  std::ostringstream oss;
  oss << section << "[" << index << "]." << field;
  return oss.str();
}

bool finite(double x) { return std::isfinite(x); }

void require(std::vector<ValidationIssue>& sink, bool cond, std::string path,
             std::string message) {
  if (!cond) sink.push_back({std::move(path), std::move(message)});
}

void check_profile(std::vector<ValidationIssue>& violations, const std::vector<double>& profile,
                   int periods, bool nonnegative, const std::string& path) {
  if (static_cast<int>(profile.size()) != periods) {
    std::ostringstream oss;
    oss << "length " << profile.size() << " does not match time grid (" << periods << ")";
    violations.push_back({path, oss.str()});
    return;
  }
  for (std::size_t k = 0; k < profile.size(); ++k) {
    if (!finite(profile[k])) {
      violations.push_back({path, "entry " + std::to_string(k + 1) + " is not finite"});
      return;
    }
    if (nonnegative && profile[k] < 0.0) {
      violations.push_back({path, "entry " + std::to_string(k + 1) + " is negative"});
      return;
    }
  }
}

} // namespace

double ramp_target_at(const FeederContext& feeder, int t) {
  if (feeder.ramp_target.size() == 1) return feeder.ramp_target.front();
  return feeder.ramp_target.at(static_cast<std::size_t>(t) - 1);
}

ValidationReport validate_instance(const MicrogridInstance& instance) {
  ValidationReport report;
  auto& violations = report.violations;
  auto& warnings = report.warnings;

  const int T = instance.time_grid.periods;
  const double tau = instance.time_grid.step_hours;
  require(violations, T >= 1, "time_grid.periods", "must be at least 1");
  require(violations, finite(tau) && tau > 0.0, "time_grid.step_hours", "must be positive");
  if (!report.ok()) return report; // profile checks below need a sane grid

  std::set<std::string> ids;
  auto check_id = [&](const std::string& id, const std::string& path) {
    require(violations, !id.empty(), path, "id must not be empty");
    if (!ids.insert(id).second)
      violations.push_back({path, "duplicate id '" + id + "'"});
  };

  for (std::size_t k = 0; k < instance.dispatchable_units.size(); ++k) {
    const auto& g = instance.dispatchable_units[k];
    const std::string sec = "dispatchable_units";
    check_id(g.id, at(sec, k, "id"));
    require(violations, finite(g.p_min) && g.p_min >= 0.0, at(sec, k, "p_min"),
            "must be nonnegative");
    require(violations, finite(g.p_max) && g.p_min <= g.p_max, at(sec, k, "p_min"),
            "p_min exceeds p_max");
    require(violations, finite(g.ramp_up) && g.ramp_up >= 0.0, at(sec, k, "ramp_up"),
            "must be nonnegative");
    require(violations, finite(g.ramp_down) && g.ramp_down >= 0.0, at(sec, k, "ramp_down"),
            "must be nonnegative");
    require(violations, g.min_up >= 1, at(sec, k, "min_up"), "must be at least 1");
    require(violations, g.min_down >= 1, at(sec, k, "min_down"), "must be at least 1");
    require(violations,
            finite(g.marginal_cost) && g.marginal_cost >= 0.0 && finite(g.no_load_cost) &&
                g.no_load_cost >= 0.0 && finite(g.startup_cost) && g.startup_cost >= 0.0 &&
                finite(g.shutdown_cost) && g.shutdown_cost >= 0.0,
            at(sec, k, "costs"), "cost coefficients must be finite and nonnegative");
    require(violations, g.initial_state_duration >= 0, at(sec, k, "initial_state_duration"),
            "must be nonnegative");
    if (g.initial_committed) {
      require(violations, finite(g.initial_power) && g.p_min <= g.initial_power &&
                              g.initial_power <= g.p_max,
              at(sec, k, "initial_power"), "must lie in [p_min, p_max] while committed");
    } else {
      require(violations, g.initial_power == 0.0, at(sec, k, "initial_power"),
              "must be 0 while not committed");
    }
    if (g.p_min > g.ramp_up || g.p_min > g.ramp_down) {
      warnings.push_back({at(sec, k, "p_min"),
                          "p_min exceeds a ramp rate; starting or stopping this unit is "
                          "infeasible under the as-written ramp constraints"});
    }
  }

  for (std::size_t k = 0; k < instance.storage_units.size(); ++k) {
    const auto& s = instance.storage_units[k];
    const std::string sec = "storage_units";
    check_id(s.id, at(sec, k, "id"));
    require(violations, finite(s.p_dch_min) && s.p_dch_min >= 0.0 && s.p_dch_min <= s.p_dch_max,
            at(sec, k, "p_dch_min"), "requires 0 <= p_dch_min <= p_dch_max");
    require(violations, finite(s.p_ch_min) && s.p_ch_min >= 0.0 && s.p_ch_min <= s.p_ch_max,
            at(sec, k, "p_ch_min"), "requires 0 <= p_ch_min <= p_ch_max");
    require(violations, finite(s.cap_min) && s.cap_min >= 0.0 && s.cap_min <= s.cap_max,
            at(sec, k, "cap_min"), "requires 0 <= cap_min <= cap_max");
    require(violations,
            finite(s.initial_energy) && s.cap_min <= s.initial_energy &&
                s.initial_energy <= s.cap_max,
            at(sec, k, "initial_energy"), "must lie in [cap_min, cap_max]");
    require(violations, finite(s.efficiency) && s.efficiency > 0.0 && s.efficiency <= 1.0,
            at(sec, k, "efficiency"), "must lie in (0, 1]");
    require(violations, s.min_charge_time >= 1, at(sec, k, "min_charge_time"),
            "must be at least 1");
    require(violations, s.min_discharge_time >= 1, at(sec, k, "min_discharge_time"),
            "must be at least 1");
    require(violations, s.initial_mode_duration >= 0, at(sec, k, "initial_mode_duration"),
            "must be nonnegative");
  }

  for (std::size_t k = 0; k < instance.adjustable_loads.size(); ++k) {
    const auto& d = instance.adjustable_loads[k];
    const std::string sec = "adjustable_loads";
    check_id(d.id, at(sec, k, "id"));
    require(violations, d.window_start >= 1 && d.window_start <= d.window_end && d.window_end <= T,
            at(sec, k, "window_start"), "requires 1 <= window_start <= window_end <= periods");
    require(violations, d.min_on >= 1, at(sec, k, "min_on"), "must be at least 1");
    check_profile(violations, d.d_min, T, true, at(sec, k, "d_min"));
    check_profile(violations, d.d_max, T, true, at(sec, k, "d_max"));
    if (static_cast<int>(d.d_min.size()) == T && static_cast<int>(d.d_max.size()) == T) {
      for (int t = 1; t <= T; ++t) {
        if (d.d_min[t - 1] > d.d_max[t - 1]) {
          violations.push_back({at(sec, k, "d_min"),
                                "exceeds d_max at period " + std::to_string(t)});
          break;
        }
      }
      if (d.window_start >= 1 && d.window_start <= d.window_end && d.window_end <= T) {
        double lo = 0.0, hi = 0.0;
        for (int t = d.window_start; t <= d.window_end; ++t) {
          lo += d.d_min[t - 1] * tau;
          hi += d.d_max[t - 1] * tau;
        }
        require(violations, finite(d.energy) && d.energy >= lo && d.energy <= hi,
                at(sec, k, "energy"),
                "not reachable with the rated-power band over the window");
        const double span = hi - lo;
        if (d.energy >= lo && d.energy <= hi &&
            (d.energy == lo || d.energy == hi) && span > 0.0) {
          warnings.push_back({at(sec, k, "energy"),
                              "sits at an endpoint of its feasibility bound; the load has no "
                              "scheduling freedom"});
        }
      }
    }
    require(violations, d.initial_on_duration >= 0, at(sec, k, "initial_on_duration"),
            "must be nonnegative");
    if (d.initial_operating) {
      const int owed = d.min_on - d.initial_on_duration;
      if (owed > 0 && d.window_start > 1) {
        violations.push_back({at(sec, k, "initial_operating"),
                              "unfinished min_on obligation extends into periods before the "
                              "operating window opens"});
      }
    }
  }

  check_profile(violations, instance.fixed_profiles.fixed_load, T, true,
                "fixed_profiles.fixed_load");
  check_profile(violations, instance.fixed_profiles.nondispatchable_gen, T, true,
                "fixed_profiles.nondispatchable_gen");

  require(violations, finite(instance.grid_link.transfer_limit) &&
                          instance.grid_link.transfer_limit >= 0.0,
          "grid_link.transfer_limit", "must be nonnegative");
  if (instance.grid_link.initial_exchange) {
    require(violations, finite(*instance.grid_link.initial_exchange),
            "grid_link.initial_exchange", "must be finite");
  }
  check_profile(violations, instance.grid_link.market_price, T, false,
                "grid_link.market_price");

  return report;
}

} // namespace gridramp
