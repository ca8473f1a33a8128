#include "gridramp/formulation.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace gridramp {

namespace {

using Terms = std::vector<std::pair<int, double>>;

std::string col(const char* base, const std::string& comp, int t) {
  return std::string(base) + "[" + comp + "][" + std::to_string(t) + "]";
}

std::string rowtag(const char* base, const std::string& comp, int t) {
  return std::string(base) + "[" + comp + "][" + std::to_string(t) + "]";
}

std::string rowtag2(const char* base, const std::string& comp, int t, int s) {
  return std::string(base) + "[" + comp + "][" + std::to_string(t) + "][" +
         std::to_string(s) + "]";
}

// Merges duplicate columns and drops zeros before adding the row. A row
// whose variables cancel entirely is checked as a constant fact and
// skipped; a violated constant row means a construction bug.
void add_row(MILPModel& m, Terms terms, RowSense sense, double rhs, std::string tag) {
  std::map<int, double> acc;
  for (const auto& [id, c] : terms) acc[id] += c;
  Terms out;
  out.reserve(acc.size());
  for (const auto& [id, c] : acc) {
    if (c != 0.0) out.emplace_back(id, c);
  }
  if (out.empty()) {
    const bool holds = sense == RowSense::le   ? 0.0 <= rhs
                       : sense == RowSense::ge ? 0.0 >= rhs
                                               : rhs == 0.0;
    if (!holds) throw std::logic_error("contradictory constant row " + tag);
    return;
  }
  m.add_constraint(std::move(out), sense, rhs, std::move(tag));
}

// Shared expansion for minimum-duration rules on an indicator family:
// within each lookahead window, staying on is forced after a 0 -> 1 step
// (with_complement = false) or staying off after a 1 -> 0 step
// (with_complement = true). `first` / `last` bound the periods whose
// transitions are inspected; lookahead caps at `horizon`.
void add_min_duration_rows(MILPModel& m, const std::vector<int>& ind, int first, int last,
                           int horizon, int duration, int initial_value,
                           bool with_complement, const char* base, const std::string& comp) {
  if (duration <= 1) return; // single-period stays are always legal
  auto var = [&](int t) { return ind[static_cast<std::size_t>(t) - 1]; };
  // On form:  I_s >= I_t - I_{t-1}   (stay on after a 0 -> 1 step)
  // Off form: I_s <= 1 - I_{t-1} + I_t (stay off after a 1 -> 0 step)
  const RowSense sense = with_complement ? RowSense::le : RowSense::ge;
  const double base_rhs = with_complement ? 1.0 : 0.0;
  for (int t = first; t <= last; ++t) {
    const int stop = std::min(t + duration - 1, horizon);
    for (int s = t; s <= stop; ++s) {
      Terms terms{{var(s), 1.0}, {var(t), -1.0}};
      double rhs = base_rhs;
      if (t >= 2) {
        terms.emplace_back(var(t - 1), 1.0);
      } else {
        rhs -= static_cast<double>(initial_value);
      }
      add_row(m, std::move(terms), sense, rhs, rowtag2(base, comp, t, s));
    }
  }
}

std::vector<double> broadcast_prices(const std::vector<double>& prices, int T) {
  if (prices.size() == 1) return std::vector<double>(static_cast<std::size_t>(T), prices[0]);
  if (static_cast<int>(prices.size()) != T) {
    throw std::invalid_argument("price series must have one entry per period or a single entry");
  }
  return prices;
}

} // namespace

BuiltModel build_component_constraints(const MicrogridInstance& inst,
                                       const BuildOptions& options) {
  ValidationReport report = validate_instance(inst);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw std::invalid_argument("invalid instance: " + v.path + ": " + v.message);
  }

  BuiltModel built;
  MILPModel& m = built.model;
  auto tables = built.map.tables();
  const int T = inst.time_grid.periods;
  const double tau = inst.time_grid.step_hours;

  auto new_var = [&](const std::string& tag, VarKind kind, double lo, double hi) {
    const int id = m.add_variable(tag, kind, lo, hi);
    built.map.insert(tag, id);
    return id;
  };
  auto series = [&](const char* base, const std::string& comp, VarKind kind, double lo,
                    double hi) {
    std::vector<int> ids(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) {
      ids[static_cast<std::size_t>(t) - 1] = new_var(col(base, comp, t), kind, lo, hi);
    }
    return ids;
  };

  // --- variables, in the documented fixed order ---
  for (const auto& g : inst.dispatchable_units) {
    tables.unit_power.push_back(series("P", g.id, VarKind::continuous, 0.0, g.p_max));
    tables.unit_on.push_back(series("I", g.id, VarKind::binary, 0.0, 1.0));
    tables.unit_startup.push_back(series("SU", g.id, VarKind::continuous, 0.0, kInfinity));
    tables.unit_shutdown.push_back(series("SD", g.id, VarKind::continuous, 0.0, kInfinity));
  }
  for (const auto& s : inst.storage_units) {
    tables.storage_discharge.push_back(
        series("Pdch", s.id, VarKind::continuous, 0.0, s.p_dch_max));
    tables.storage_charge.push_back(series("Pch", s.id, VarKind::continuous, 0.0, s.p_ch_max));
    tables.storage_dch_on.push_back(series("u", s.id, VarKind::binary, 0.0, 1.0));
    tables.storage_ch_on.push_back(series("v", s.id, VarKind::binary, 0.0, 1.0));
    tables.storage_energy.push_back(
        series("C", s.id, VarKind::continuous, s.cap_min, s.cap_max));
  }
  for (const auto& d : inst.adjustable_loads) {
    std::vector<int> dp(static_cast<std::size_t>(T)), dz(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) {
      const bool in_window = t >= d.window_start && t <= d.window_end;
      const double hi = in_window ? d.d_max[static_cast<std::size_t>(t) - 1] : 0.0;
      dp[static_cast<std::size_t>(t) - 1] =
          new_var(col("D", d.id, t), VarKind::continuous, 0.0, hi);
      dz[static_cast<std::size_t>(t) - 1] =
          new_var(col("z", d.id, t), VarKind::binary, 0.0, in_window ? 1.0 : 0.0);
    }
    tables.load_power.push_back(std::move(dp));
    tables.load_on.push_back(std::move(dz));
  }
  for (int t = 1; t <= T; ++t) {
    tables.grid_exchange.push_back(
        new_var("PM[" + std::to_string(t) + "]", VarKind::continuous, -kInfinity, kInfinity));
  }

  const VariableMap& map = built.map;

  // --- dispatchable units ---
  for (std::size_t gi = 0; gi < inst.dispatchable_units.size(); ++gi) {
    const auto& g = inst.dispatchable_units[gi];
    const int gidx = static_cast<int>(gi);
    const double p0 = g.initial_committed ? g.initial_power : 0.0;
    const int i0 = g.initial_committed ? 1 : 0;

    for (int t = 1; t <= T; ++t) {
      const int P = map.unit_power(gidx, t);
      const int I = map.unit_on(gidx, t);
      add_row(m, {{P, 1.0}, {I, -g.p_min}}, RowSense::ge, 0.0, rowtag("cap_lb", g.id, t));
      add_row(m, {{P, 1.0}, {I, -g.p_max}}, RowSense::le, 0.0, rowtag("cap_ub", g.id, t));
    }

    for (int t = 1; t <= T; ++t) {
      const int P = map.unit_power(gidx, t);
      if (t == 1) {
        add_row(m, {{P, 1.0}}, RowSense::le, g.ramp_up + p0, rowtag("ramp_up", g.id, t));
        add_row(m, {{P, -1.0}}, RowSense::le, g.ramp_down - p0, rowtag("ramp_dn", g.id, t));
      } else {
        const int Pp = map.unit_power(gidx, t - 1);
        add_row(m, {{P, 1.0}, {Pp, -1.0}}, RowSense::le, g.ramp_up,
                rowtag("ramp_up", g.id, t));
        add_row(m, {{P, -1.0}, {Pp, 1.0}}, RowSense::le, g.ramp_down,
                rowtag("ramp_dn", g.id, t));
      }
    }

    std::vector<int> on(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) on[static_cast<std::size_t>(t) - 1] = map.unit_on(gidx, t);
    add_min_duration_rows(m, on, 1, T, T, g.min_up, i0, false, "min_up", g.id);
    add_min_duration_rows(m, on, 1, T, T, g.min_down, i0, true, "min_dn", g.id);

    if (g.startup_cost > 0.0) {
      for (int t = 1; t <= T; ++t) {
        Terms terms{{map.unit_startup(gidx, t), 1.0}, {map.unit_on(gidx, t), -g.startup_cost}};
        double rhs = 0.0;
        if (t > 1) {
          terms.emplace_back(map.unit_on(gidx, t - 1), g.startup_cost);
        } else {
          rhs = -g.startup_cost * i0;
        }
        add_row(m, std::move(terms), RowSense::ge, rhs, rowtag("su_def", g.id, t));
      }
    }
    if (g.shutdown_cost > 0.0) {
      for (int t = 1; t <= T; ++t) {
        Terms terms{{map.unit_shutdown(gidx, t), 1.0}, {map.unit_on(gidx, t), g.shutdown_cost}};
        double rhs = 0.0;
        if (t > 1) {
          terms.emplace_back(map.unit_on(gidx, t - 1), -g.shutdown_cost);
        } else {
          rhs = g.shutdown_cost * i0;
        }
        add_row(m, std::move(terms), RowSense::ge, rhs, rowtag("sd_def", g.id, t));
      }
    }

    // Unfinished minimum-duration obligations from before the horizon pin
    // the commitment for the remaining periods.
    if (g.initial_committed && g.initial_state_duration < g.min_up) {
      const int owed = std::min(g.min_up - g.initial_state_duration, T);
      for (int t = 1; t <= owed; ++t) m.tighten_bounds(map.unit_on(gidx, t), 1.0, 1.0);
    }
    if (!g.initial_committed && g.initial_state_duration < g.min_down) {
      const int owed = std::min(g.min_down - g.initial_state_duration, T);
      for (int t = 1; t <= owed; ++t) m.tighten_bounds(map.unit_on(gidx, t), 0.0, 0.0);
    }
  }

  // --- storage units ---
  for (std::size_t si = 0; si < inst.storage_units.size(); ++si) {
    const auto& s = inst.storage_units[si];
    const int sidx = static_cast<int>(si);
    const int u0 = s.initial_mode == StorageUnit::Mode::discharging ? 1 : 0;
    const int v0 = s.initial_mode == StorageUnit::Mode::charging ? 1 : 0;

    for (int t = 1; t <= T; ++t) {
      const int Pd = map.storage_discharge(sidx, t);
      const int Pc = map.storage_charge(sidx, t);
      const int U = map.storage_dch_on(sidx, t);
      const int V = map.storage_ch_on(sidx, t);
      add_row(m, {{Pd, 1.0}, {U, -s.p_dch_max}}, RowSense::le, 0.0, rowtag("dch_ub", s.id, t));
      add_row(m, {{Pd, 1.0}, {U, -s.p_dch_min}}, RowSense::ge, 0.0, rowtag("dch_lb", s.id, t));
      add_row(m, {{Pc, 1.0}, {V, -s.p_ch_max}}, RowSense::le, 0.0, rowtag("ch_ub", s.id, t));
      add_row(m, {{Pc, 1.0}, {V, -s.p_ch_min}}, RowSense::ge, 0.0, rowtag("ch_lb", s.id, t));
      add_row(m, {{U, 1.0}, {V, 1.0}}, RowSense::le, 1.0, rowtag("excl", s.id, t));

      Terms soc{{map.storage_energy(sidx, t), 1.0},
                {Pd, tau / s.efficiency},
                {Pc, -tau}};
      double rhs = 0.0;
      if (t > 1) {
        soc.emplace_back(map.storage_energy(sidx, t - 1), -1.0);
      } else {
        rhs = s.initial_energy;
      }
      add_row(m, std::move(soc), RowSense::eq, rhs, rowtag("soc", s.id, t));
    }

    std::vector<int> dch(static_cast<std::size_t>(T)), ch(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) {
      dch[static_cast<std::size_t>(t) - 1] = map.storage_dch_on(sidx, t);
      ch[static_cast<std::size_t>(t) - 1] = map.storage_ch_on(sidx, t);
    }
    add_min_duration_rows(m, dch, 1, T, T, s.min_discharge_time, u0, false, "min_dch", s.id);
    add_min_duration_rows(m, ch, 1, T, T, s.min_charge_time, v0, false, "min_ch", s.id);

    if (u0 == 1 && s.initial_mode_duration < s.min_discharge_time) {
      const int owed = std::min(s.min_discharge_time - s.initial_mode_duration, T);
      for (int t = 1; t <= owed; ++t) m.tighten_bounds(map.storage_dch_on(sidx, t), 1.0, 1.0);
    }
    if (v0 == 1 && s.initial_mode_duration < s.min_charge_time) {
      const int owed = std::min(s.min_charge_time - s.initial_mode_duration, T);
      for (int t = 1; t <= owed; ++t) m.tighten_bounds(map.storage_ch_on(sidx, t), 1.0, 1.0);
    }

    if (options.terminal_soc_at_least_initial) {
      add_row(m, {{map.storage_energy(sidx, T), 1.0}}, RowSense::ge, s.initial_energy,
              rowtag("soc_final", s.id, T));
    }
  }

  // --- adjustable loads ---
  for (std::size_t di = 0; di < inst.adjustable_loads.size(); ++di) {
    const auto& d = inst.adjustable_loads[di];
    const int didx = static_cast<int>(di);
    const int z0 = d.initial_operating ? 1 : 0;

    Terms energy;
    for (int t = d.window_start; t <= d.window_end; ++t) {
      const int D = map.load_power(didx, t);
      const int Z = map.load_on(didx, t);
      add_row(m, {{D, 1.0}, {Z, -d.d_min[static_cast<std::size_t>(t) - 1]}}, RowSense::ge, 0.0,
              rowtag("band_lb", d.id, t));
      add_row(m, {{D, 1.0}, {Z, -d.d_max[static_cast<std::size_t>(t) - 1]}}, RowSense::le, 0.0,
              rowtag("band_ub", d.id, t));
      energy.emplace_back(D, tau);
    }
    add_row(m, std::move(energy), RowSense::eq, d.energy, "energy[" + d.id + "]");

    std::vector<int> on(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) on[static_cast<std::size_t>(t) - 1] = map.load_on(didx, t);
    add_min_duration_rows(m, on, d.window_start, d.window_end, T, d.min_on, z0, false,
                          "min_on", d.id);

    if (d.initial_operating && d.initial_on_duration < d.min_on && d.window_start == 1) {
      const int owed = std::min({d.min_on - d.initial_on_duration, d.window_end, T});
      for (int t = 1; t <= owed; ++t) m.tighten_bounds(map.load_on(didx, t), 1.0, 1.0);
    }
  }

  return built;
}

void add_power_balance(MILPModel& m, const VariableMap& map, const MicrogridInstance& inst) {
  const int T = inst.time_grid.periods;
  for (int t = 1; t <= T; ++t) {
    Terms terms;
    for (std::size_t gi = 0; gi < inst.dispatchable_units.size(); ++gi) {
      terms.emplace_back(map.unit_power(static_cast<int>(gi), t), 1.0);
    }
    for (std::size_t si = 0; si < inst.storage_units.size(); ++si) {
      terms.emplace_back(map.storage_discharge(static_cast<int>(si), t), 1.0);
      terms.emplace_back(map.storage_charge(static_cast<int>(si), t), -1.0);
    }
    for (std::size_t di = 0; di < inst.adjustable_loads.size(); ++di) {
      terms.emplace_back(map.load_power(static_cast<int>(di), t), -1.0);
    }
    terms.emplace_back(map.grid_exchange(t), 1.0);
    const double rhs = inst.fixed_profiles.fixed_load[static_cast<std::size_t>(t) - 1] -
                       inst.fixed_profiles.nondispatchable_gen[static_cast<std::size_t>(t) - 1];
    m.add_constraint(std::move(terms), RowSense::eq, rhs, "balance[" + std::to_string(t) + "]");
  }
}

void add_grid_limits(MILPModel& m, const VariableMap& map, const MicrogridInstance& inst,
                     double limit) {
  if (limit < 0.0) throw std::invalid_argument("transfer limit must be nonnegative");
  for (int t = 1; t <= inst.time_grid.periods; ++t) {
    m.set_bounds(map.grid_exchange(t), -limit, limit);
  }
}

void set_cost_objective(MILPModel& m, const VariableMap& map, const MicrogridInstance& inst,
                        const std::vector<double>& prices) {
  const int T = inst.time_grid.periods;
  const double tau = inst.time_grid.step_hours;
  const std::vector<double> rho = broadcast_prices(prices, T);

  Terms coeffs;
  for (std::size_t gi = 0; gi < inst.dispatchable_units.size(); ++gi) {
    const auto& g = inst.dispatchable_units[gi];
    const int gidx = static_cast<int>(gi);
    for (int t = 1; t <= T; ++t) {
      if (g.marginal_cost != 0.0) coeffs.emplace_back(map.unit_power(gidx, t), g.marginal_cost * tau);
      if (g.no_load_cost != 0.0) coeffs.emplace_back(map.unit_on(gidx, t), g.no_load_cost * tau);
      if (g.startup_cost > 0.0) coeffs.emplace_back(map.unit_startup(gidx, t), 1.0);
      if (g.shutdown_cost > 0.0) coeffs.emplace_back(map.unit_shutdown(gidx, t), 1.0);
    }
  }
  for (int t = 1; t <= T; ++t) {
    const double p = rho[static_cast<std::size_t>(t) - 1];
    if (p != 0.0) coeffs.emplace_back(map.grid_exchange(t), p * tau);
  }
  m.set_objective(ObjSense::minimize, std::move(coeffs), 0.0);
}

void set_ramp_objective(MILPModel& m, const VariableMap& map, const MicrogridInstance& inst,
                        int t_star, RampDirection direction) {
  const int T = inst.time_grid.periods;
  if (t_star < 1 || t_star > T) throw std::invalid_argument("ramp period out of range");
  const double sign = direction == RampDirection::up ? 1.0 : -1.0;
  if (t_star == 1) {
    if (!inst.grid_link.initial_exchange) {
      throw std::invalid_argument(
          "ramp objective at the first period needs the pre-horizon exchange");
    }
    m.set_objective(ObjSense::maximize, {{map.grid_exchange(1), sign}},
                    -sign * *inst.grid_link.initial_exchange);
    return;
  }
  m.set_objective(ObjSense::maximize,
                  {{map.grid_exchange(t_star), sign}, {map.grid_exchange(t_star - 1), -sign}},
                  0.0);
}

std::optional<BandConflict> add_ramp_band(MILPModel& m, const VariableMap& map,
                                          const MicrogridInstance& inst,
                                          const std::vector<double>& delta_low,
                                          const std::vector<double>& delta_up,
                                          double capability) {
  const int T = inst.time_grid.periods;
  if (capability < 0.0) throw std::invalid_argument("ramp capability must be nonnegative");
  if (static_cast<int>(delta_low.size()) != T || static_cast<int>(delta_up.size()) != T) {
    throw std::invalid_argument("ramp band vectors must have one entry per period");
  }
  const int first = inst.grid_link.initial_exchange ? 1 : 2;

  // Validate every transition before touching the model.
  for (int t = first; t <= T; ++t) {
    const double lo_req = delta_low[static_cast<std::size_t>(t) - 1];
    const double hi_req = delta_up[static_cast<std::size_t>(t) - 1];
    const double lo = std::max(lo_req, -capability);
    const double hi = std::min(hi_req, capability);
    if (lo > hi) {
      BandConflict c;
      c.period = t;
      c.lower = lo_req;
      c.upper = hi_req;
      c.capability = capability;
      c.exceeds_capability = lo_req <= hi_req;
      c.message = c.exceeds_capability
                      ? "transition " + std::to_string(t) + ": required ramp band [" +
                            std::to_string(lo_req) + ", " + std::to_string(hi_req) +
                            "] lies outside the achievable +-" + std::to_string(capability)
                      : "transition " + std::to_string(t) + ": ramp band is empty (lower " +
                            std::to_string(lo_req) + " exceeds upper " + std::to_string(hi_req) +
                            ")";
      return c;
    }
  }

  for (int t = first; t <= T; ++t) {
    const double lo = std::max(delta_low[static_cast<std::size_t>(t) - 1], -capability);
    const double hi = std::min(delta_up[static_cast<std::size_t>(t) - 1], capability);
    Terms up{{map.grid_exchange(t), 1.0}};
    Terms dn{{map.grid_exchange(t), 1.0}};
    double lo_rhs = lo;
    double hi_rhs = hi;
    if (t == 1) {
      lo_rhs += *inst.grid_link.initial_exchange;
      hi_rhs += *inst.grid_link.initial_exchange;
    } else {
      up.emplace_back(map.grid_exchange(t - 1), -1.0);
      dn.emplace_back(map.grid_exchange(t - 1), -1.0);
    }
    m.add_constraint(std::move(dn), RowSense::ge, lo_rhs, "ramp_lo[" + std::to_string(t) + "]");
    m.add_constraint(std::move(up), RowSense::le, hi_rhs, "ramp_hi[" + std::to_string(t) + "]");
  }
  return std::nullopt;
}

} // namespace gridramp
