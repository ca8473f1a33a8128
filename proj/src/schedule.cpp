#include "gridramp/schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gridramp {

namespace {

std::vector<double> broadcast(const std::vector<double>& series, int T) {
  if (series.empty()) return std::vector<double>(static_cast<std::size_t>(T), 0.0);
  if (series.size() == 1) return std::vector<double>(static_cast<std::size_t>(T), series[0]);
  if (static_cast<int>(series.size()) != T) {
    throw std::invalid_argument("price series length does not match the time grid");
  }
  return series;
}

std::string where(const std::string& kind, const std::string& id, int t) {
  std::ostringstream oss;
  oss << kind << " " << id << ", period " << t;
  return oss.str();
}

std::string num(double v) {
  std::ostringstream oss;
  oss << v;
  return oss.str();
}

// Scans an on/off trace and reports runs of `state_value` that end before
// the horizon with fewer periods than required. The pre-horizon run length
// seeds the first run when the initial state matches.
template <typename Flag>
void check_min_run(std::vector<ValidationIssue>& issues, const std::vector<Flag>& trace,
                   int state_value, int min_len, int initial_state, int initial_len,
                   const std::string& path, const std::string& rule) {
  const int T = static_cast<int>(trace.size());
  int run = initial_state == state_value ? initial_len : 0;
  int prev = initial_state;
  for (int t = 1; t <= T; ++t) {
    const int cur = static_cast<int>(trace[static_cast<std::size_t>(t) - 1]);
    if (cur == prev) {
      if (cur == state_value) ++run;
    } else {
      if (prev == state_value && run < min_len) {
        issues.push_back({path, rule + ": run of " + std::to_string(run) +
                                    " period(s) ending at period " + std::to_string(t - 1) +
                                    " is shorter than " + std::to_string(min_len)});
      }
      run = cur == state_value ? 1 : 0;
      prev = cur;
    }
  }
  // A run still open at the horizon end is truncated, not violated.
}

} // namespace

Schedule decode_schedule(const MicrogridInstance& inst, const VariableMap& map,
                         const std::vector<double>& values,
                         const std::vector<double>& prices) {
  const int T = inst.time_grid.periods;
  const double tau = inst.time_grid.step_hours;
  const std::vector<double> rho = broadcast(prices, T);

  Schedule s;
  s.periods = T;
  s.step_hours = tau;
  auto val = [&](int id) { return values.at(static_cast<std::size_t>(id)); };
  auto flag = [&](int id) { return static_cast<int>(std::lround(val(id))); };

  for (std::size_t gi = 0; gi < inst.dispatchable_units.size(); ++gi) {
    const auto& g = inst.dispatchable_units[gi];
    const int gidx = static_cast<int>(gi);
    UnitSchedule u;
    u.id = g.id;
    for (int t = 1; t <= T; ++t) {
      u.power.push_back(val(map.unit_power(gidx, t)));
      u.committed.push_back(flag(map.unit_on(gidx, t)));
      u.startup.push_back(val(map.unit_startup(gidx, t)));
      u.shutdown.push_back(val(map.unit_shutdown(gidx, t)));
      s.cost.generation += g.marginal_cost * u.power.back() * tau +
                           g.no_load_cost * u.committed.back() * tau;
      s.cost.startup_shutdown += u.startup.back() + u.shutdown.back();
    }
    s.units.push_back(std::move(u));
  }

  for (std::size_t si = 0; si < inst.storage_units.size(); ++si) {
    const int sidx = static_cast<int>(si);
    StorageSchedule st;
    st.id = inst.storage_units[si].id;
    for (int t = 1; t <= T; ++t) {
      st.discharge.push_back(val(map.storage_discharge(sidx, t)));
      st.charge.push_back(val(map.storage_charge(sidx, t)));
      st.discharging.push_back(flag(map.storage_dch_on(sidx, t)));
      st.charging.push_back(flag(map.storage_ch_on(sidx, t)));
      st.energy.push_back(val(map.storage_energy(sidx, t)));
    }
    s.storage.push_back(std::move(st));
  }

  for (std::size_t di = 0; di < inst.adjustable_loads.size(); ++di) {
    const int didx = static_cast<int>(di);
    LoadSchedule ld;
    ld.id = inst.adjustable_loads[di].id;
    for (int t = 1; t <= T; ++t) {
      ld.power.push_back(val(map.load_power(didx, t)));
      ld.operating.push_back(flag(map.load_on(didx, t)));
    }
    s.loads.push_back(std::move(ld));
  }

  for (int t = 1; t <= T; ++t) {
    const double pm = val(map.grid_exchange(t));
    s.exchange.push_back(pm);
    s.cost.purchase += rho[static_cast<std::size_t>(t) - 1] * pm * tau;
  }

  s.cost.total = s.cost.generation + s.cost.startup_shutdown + s.cost.purchase;
  return s;
}

std::vector<ValidationIssue> check_schedule(const MicrogridInstance& inst,
                                            const Schedule& s, double tol) {
  std::vector<ValidationIssue> issues;
  const int T = inst.time_grid.periods;
  const double tau = inst.time_grid.step_hours;
  auto bad = [&](std::string path, std::string message) {
    issues.push_back({std::move(path), std::move(message)});
  };

  const auto sized = [T](const auto&... series) {
    return ((static_cast<int>(series.size()) == T) && ...);
  };
  bool shape_ok = s.periods == T && sized(s.exchange) &&
                  s.units.size() == inst.dispatchable_units.size() &&
                  s.storage.size() == inst.storage_units.size() &&
                  s.loads.size() == inst.adjustable_loads.size();
  if (shape_ok) {
    for (const auto& u : s.units)
      shape_ok = shape_ok && sized(u.power, u.committed, u.startup, u.shutdown);
    for (const auto& st : s.storage)
      shape_ok = shape_ok && sized(st.discharge, st.charge, st.discharging, st.charging,
                                   st.energy);
    for (const auto& ld : s.loads) shape_ok = shape_ok && sized(ld.power, ld.operating);
  }
  if (!shape_ok) {
    bad("schedule", "shape does not match the instance");
    return issues;
  }

  for (std::size_t gi = 0; gi < inst.dispatchable_units.size(); ++gi) {
    const auto& g = inst.dispatchable_units[gi];
    const auto& u = s.units[gi];
    for (int t = 1; t <= T; ++t) {
      const double p = u.power[static_cast<std::size_t>(t) - 1];
      const int on = u.committed[static_cast<std::size_t>(t) - 1];
      if (on != 0 && on != 1) bad(where("unit", g.id, t), "commitment flag is not 0/1");
      if (on == 1) {
        if (p < g.p_min - tol || p > g.p_max + tol) {
          bad(where("unit", g.id, t),
              "output " + num(p) + " outside committed band [" + num(g.p_min) + ", " +
                  num(g.p_max) + "]");
        }
      } else if (std::fabs(p) > tol) {
        bad(where("unit", g.id, t), "output " + num(p) + " while offline");
      }
      const double prev = t == 1 ? (g.initial_committed ? g.initial_power : 0.0)
                                 : u.power[static_cast<std::size_t>(t) - 2];
      if (p - prev > g.ramp_up + tol) {
        bad(where("unit", g.id, t), "ramp up " + num(p - prev) + " exceeds " + num(g.ramp_up));
      }
      if (prev - p > g.ramp_down + tol) {
        bad(where("unit", g.id, t),
            "ramp down " + num(prev - p) + " exceeds " + num(g.ramp_down));
      }
      const int prev_on = t == 1 ? (g.initial_committed ? 1 : 0)
                                 : u.committed[static_cast<std::size_t>(t) - 2];
      const double su = u.startup[static_cast<std::size_t>(t) - 1];
      const double sd = u.shutdown[static_cast<std::size_t>(t) - 1];
      if (su < -tol || sd < -tol) bad(where("unit", g.id, t), "negative startup/shutdown cost");
      if (su + tol < g.startup_cost * (on - prev_on)) {
        bad(where("unit", g.id, t), "startup cost below the incurred amount");
      }
      if (sd + tol < g.shutdown_cost * (prev_on - on)) {
        bad(where("unit", g.id, t), "shutdown cost below the incurred amount");
      }
    }
    check_min_run(issues, u.committed, 1, g.min_up, g.initial_committed ? 1 : 0,
                  g.initial_state_duration, "unit " + g.id, "minimum up time");
    check_min_run(issues, u.committed, 0, g.min_down, g.initial_committed ? 1 : 0,
                  g.initial_state_duration, "unit " + g.id, "minimum down time");
  }

  for (std::size_t si = 0; si < inst.storage_units.size(); ++si) {
    const auto& unit = inst.storage_units[si];
    const auto& st = s.storage[si];
    double soc_prev = unit.initial_energy;
    for (int t = 1; t <= T; ++t) {
      const std::size_t k = static_cast<std::size_t>(t) - 1;
      const int u = st.discharging[k];
      const int v = st.charging[k];
      if ((u != 0 && u != 1) || (v != 0 && v != 1)) {
        bad(where("storage", unit.id, t), "mode flag is not 0/1");
      }
      if (u + v > 1) bad(where("storage", unit.id, t), "charging and discharging at once");
      const double pd = st.discharge[k];
      const double pc = st.charge[k];
      if (u == 1) {
        if (pd < unit.p_dch_min - tol || pd > unit.p_dch_max + tol) {
          bad(where("storage", unit.id, t), "discharge power " + num(pd) + " outside band");
        }
      } else if (std::fabs(pd) > tol) {
        bad(where("storage", unit.id, t), "discharging while not in discharge mode");
      }
      if (v == 1) {
        if (pc < unit.p_ch_min - tol || pc > unit.p_ch_max + tol) {
          bad(where("storage", unit.id, t), "charge power " + num(pc) + " outside band");
        }
      } else if (std::fabs(pc) > tol) {
        bad(where("storage", unit.id, t), "charging while not in charge mode");
      }
      const double soc = st.energy[k];
      const double expect = soc_prev - pd * tau / unit.efficiency + pc * tau;
      if (std::fabs(soc - expect) > tol) {
        bad(where("storage", unit.id, t),
            "stored energy " + num(soc) + " breaks the balance (expected " + num(expect) + ")");
      }
      if (soc < unit.cap_min - tol || soc > unit.cap_max + tol) {
        bad(where("storage", unit.id, t), "stored energy " + num(soc) + " outside capacity");
      }
      soc_prev = soc;
    }
    const int init_state = unit.initial_mode == StorageUnit::Mode::discharging ? 2
                           : unit.initial_mode == StorageUnit::Mode::charging  ? 1
                                                                               : 0;
    std::vector<int> mode(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) {
      const std::size_t k = static_cast<std::size_t>(t) - 1;
      mode[k] = st.discharging[k] == 1 ? 2 : st.charging[k] == 1 ? 1 : 0;
    }
    check_min_run(issues, mode, 2, unit.min_discharge_time, init_state,
                  unit.initial_mode_duration, "storage " + unit.id, "minimum discharge time");
    check_min_run(issues, mode, 1, unit.min_charge_time, init_state,
                  unit.initial_mode_duration, "storage " + unit.id, "minimum charge time");
  }

  for (std::size_t di = 0; di < inst.adjustable_loads.size(); ++di) {
    const auto& d = inst.adjustable_loads[di];
    const auto& ld = s.loads[di];
    double energy = 0.0;
    for (int t = 1; t <= T; ++t) {
      const std::size_t k = static_cast<std::size_t>(t) - 1;
      const int z = ld.operating[k];
      const double p = ld.power[k];
      if (z != 0 && z != 1) bad(where("load", d.id, t), "operating flag is not 0/1");
      const bool in_window = t >= d.window_start && t <= d.window_end;
      if (!in_window) {
        if (z != 0) bad(where("load", d.id, t), "operating outside the window");
        if (std::fabs(p) > tol) bad(where("load", d.id, t), "consuming outside the window");
        continue;
      }
      if (z == 1) {
        if (p < d.d_min[k] - tol || p > d.d_max[k] + tol) {
          bad(where("load", d.id, t), "consumption " + num(p) + " outside the rated band");
        }
      } else if (std::fabs(p) > tol) {
        bad(where("load", d.id, t), "consuming while not operating");
      }
      energy += p * tau;
    }
    if (std::fabs(energy - d.energy) > tol) {
      bad("load " + d.id,
          "window energy " + num(energy) + " misses the target " + num(d.energy));
    }
    const int z0 = d.initial_operating && d.window_start == 1 ? 1 : 0;
    check_min_run(issues, ld.operating, 1, d.min_on, z0, d.initial_on_duration,
                  "load " + d.id, "minimum operating time");
  }

  for (int t = 1; t <= T; ++t) {
    const std::size_t k = static_cast<std::size_t>(t) - 1;
    double supply = s.exchange[k] + inst.fixed_profiles.nondispatchable_gen[k];
    for (const auto& u : s.units) supply += u.power[k];
    for (const auto& st : s.storage) supply += st.discharge[k] - st.charge[k];
    double demand = inst.fixed_profiles.fixed_load[k];
    for (const auto& ld : s.loads) demand += ld.power[k];
    if (std::fabs(supply - demand) > tol) {
      bad("balance, period " + std::to_string(t),
          "supply " + num(supply) + " does not match demand " + num(demand));
    }
    if (std::fabs(s.exchange[k]) > inst.grid_link.transfer_limit + tol) {
      bad("exchange, period " + std::to_string(t),
          "interchange " + num(s.exchange[k]) + " exceeds the line limit " +
              num(inst.grid_link.transfer_limit));
    }
  }

  return issues;
}

} // namespace gridramp
