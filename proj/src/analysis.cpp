#include "gridramp/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "gridramp/lp_format.hpp"

namespace gridramp {

namespace {

// Runs body(0..n-1) across up to `workers` threads. Callers store results
// by index, so scheduling order never affects assembled output. The first
// exception thrown by any body is rethrown after all threads join.
template <typename Body>
void parallel_for(int n, int workers, Body&& body) {
  if (n <= 0) return;
  const int use = std::min(workers, n);
  if (use <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(use));
  for (int w = 0; w < use; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(error_mu);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

BuiltModel base_model(const MicrogridInstance& inst, const BuildOptions& build) {
  BuiltModel built = build_component_constraints(inst, build);
  add_power_balance(built.model, built.map, inst);
  add_grid_limits(built.model, built.map, inst, inst.grid_link.transfer_limit);
  return built;
}

void require_increasing(const std::vector<double>& xs, const char* what) {
  if (xs.empty()) throw std::invalid_argument(std::string(what) + ": empty sweep");
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!std::isfinite(xs[k]) || xs[k] < 0.0) {
      throw std::invalid_argument(std::string(what) + ": entries must be finite and >= 0");
    }
    if (k > 0 && xs[k] <= xs[k - 1]) {
      throw std::invalid_argument(std::string(what) + ": entries must be strictly increasing");
    }
  }
}

const MilpBackend& engine(const AnalysisOptions& options) {
  return options.backend != nullptr ? *options.backend : builtin_backend();
}

void check_feeder(const FeederContext& feeder, int T) {
  if (static_cast<int>(feeder.customer_net_load.size()) != T) {
    throw std::invalid_argument("feeder: customer_net_load length does not match the time grid");
  }
  const auto n = feeder.ramp_target.size();
  if (n != 1 && static_cast<int>(n) != T) {
    throw std::invalid_argument("feeder: ramp_target needs one entry or one per period");
  }
  for (double v : feeder.customer_net_load) {
    if (!std::isfinite(v)) throw std::invalid_argument("feeder: non-finite net load entry");
  }
  for (double v : feeder.ramp_target) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("feeder: ramp targets must be finite and >= 0");
    }
  }
}

} // namespace

CapabilityResult ramping_capability(const MicrogridInstance& inst,
                                    const AnalysisOptions& options) {
  const BuiltModel base = base_model(inst, options.build);
  const int T = inst.time_grid.periods;
  const int first = inst.grid_link.initial_exchange ? 1 : 2;

  CapabilityResult out;
  for (int t = first; t <= T; ++t) out.periods.push_back(t);
  const int K = static_cast<int>(out.periods.size());
  out.up.assign(static_cast<std::size_t>(K), 0.0);
  out.down.assign(static_cast<std::size_t>(K), 0.0);
  out.solves.assign(static_cast<std::size_t>(K) * 2, {});
  if (K == 0) {
    // Single-period horizon without a pre-horizon exchange: no transition
    // to evaluate, so no swing can be promised.
    out.status = MILPStatus::optimal;
    return out;
  }

  parallel_for(K * 2, options.workers, [&](int j) {
    const int k = j / 2;
    const RampDirection dir = j % 2 == 0 ? RampDirection::up : RampDirection::down;
    MILPModel model = base.model; // each job mutates its own copy
    set_ramp_objective(model, base.map, inst, out.periods[static_cast<std::size_t>(k)], dir);
    const MILPSolution sol = engine(options).solve(model, options.solver);

    CapabilitySolve& rec = out.solves[static_cast<std::size_t>(j)];
    rec.period = out.periods[static_cast<std::size_t>(k)];
    rec.direction = dir;
    rec.status = sol.status;
    rec.objective = sol.has_incumbent() ? sol.objective : 0.0;
    rec.nodes = sol.node_count;
    if (dir == RampDirection::up) {
      out.up[static_cast<std::size_t>(k)] = rec.objective;
    } else {
      out.down[static_cast<std::size_t>(k)] = rec.objective;
    }
  });

  bool any_infeasible = false;
  bool all_optimal = true;
  for (const auto& rec : out.solves) {
    if (rec.status == MILPStatus::infeasible) any_infeasible = true;
    if (rec.status != MILPStatus::optimal) all_optimal = false;
  }
  if (any_infeasible) {
    // The swing objective only relaxes constraints already present in the
    // scheduling problem, so one infeasible transition means the balance
    // itself cannot be met.
    out.status = MILPStatus::infeasible;
    return out;
  }
  out.status = all_optimal ? MILPStatus::optimal : MILPStatus::limit_reached;

  double r = kInfinity;
  int argmin = out.periods.front();
  for (int k = 0; k < K; ++k) {
    const double rt = std::max(out.up[static_cast<std::size_t>(k)],
                               out.down[static_cast<std::size_t>(k)]);
    if (rt < r) {
      r = rt;
      argmin = out.periods[static_cast<std::size_t>(k)];
    }
  }
  out.capability = std::max(0.0, r);
  out.argmin_period = argmin;
  return out;
}

RampBounds compute_ramp_bounds(const FeederContext& feeder, int T) {
  if (T < 1) throw std::invalid_argument("time grid must have at least one period");
  check_feeder(feeder, T);

  RampBounds b;
  b.lower.assign(static_cast<std::size_t>(T), 0.0);
  b.upper.assign(static_cast<std::size_t>(T), 0.0);
  {
    const double target = feeder.ramp_target.size() == 1 ? feeder.ramp_target.front()
                                                         : feeder.ramp_target.at(0);
    b.lower[0] = -target;
    b.upper[0] = target;
  }
  for (int t = 2; t <= T; ++t) {
    const double change = feeder.customer_net_load[static_cast<std::size_t>(t) - 1] -
                          feeder.customer_net_load[static_cast<std::size_t>(t) - 2];
    const double target = ramp_target_at(feeder, t);
    b.lower[static_cast<std::size_t>(t) - 1] = -target - change;
    b.upper[static_cast<std::size_t>(t) - 1] = target - change;
  }
  return b;
}

namespace {

ScheduleOutcome run_cost_model(const MicrogridInstance& inst, const FeederContext* feeder,
                               double capability, const AnalysisOptions& options) {
  const int T = inst.time_grid.periods;
  BuiltModel built = base_model(inst, options.build);
  set_cost_objective(built.model, built.map, inst, inst.grid_link.market_price);

  ScheduleOutcome out;
  bool banded = false;
  if (feeder != nullptr) {
    const RampBounds bounds = compute_ramp_bounds(*feeder, T);
    auto conflict =
        add_ramp_band(built.model, built.map, inst, bounds.lower, bounds.upper, capability);
    if (conflict) {
      out.status = MILPStatus::infeasible;
      out.failure = ScheduleFailure::empty_band;
      out.band_conflict = conflict;
      out.message = conflict->message;
      return out;
    }
    banded = true;
  }

  if (!options.lp_dump_path.empty()) write_lp_file(built.model, options.lp_dump_path);
  out.solver = engine(options).solve(built.model, options.solver);
  out.status = out.solver.status;

  if (out.status == MILPStatus::infeasible) {
    if (banded) {
      // Separate a jointly unreachable band from a balance that fails on
      // its own by re-solving without the band rows.
      AnalysisOptions probe = options;
      probe.lp_dump_path.clear();
      const ScheduleOutcome floor = run_cost_model(inst, nullptr, 0.0, probe);
      if (floor.ok()) {
        out.failure = ScheduleFailure::ramp_unattainable;
        out.message =
            "every transition band is nonempty, but no dispatch meets all of them together";
      } else {
        out.failure = ScheduleFailure::balance_infeasible;
        out.message = "no dispatch satisfies the power balance and component limits";
      }
    } else {
      out.failure = ScheduleFailure::balance_infeasible;
      out.message = "no dispatch satisfies the power balance and component limits";
    }
    return out;
  }
  if (!out.solver.has_incumbent()) {
    out.failure = ScheduleFailure::solver_limit;
    out.message = "search stopped before finding a feasible dispatch";
    return out;
  }

  out.schedule =
      decode_schedule(inst, built.map, out.solver.values, inst.grid_link.market_price);
  out.cost = out.solver.objective;

  if (feeder != nullptr) {
    const UtilityProfile prof = utility_ramp_profile(out.schedule, *feeder);
    out.utility_net = prof.net;
    out.utility_ramp = prof.ramp;
    out.ramp_certified = true;
    for (std::size_t k = 0; k < prof.ramp.size(); ++k) {
      const double mag = std::fabs(prof.ramp[k]);
      out.max_abs_utility_ramp = std::max(out.max_abs_utility_ramp, mag);
      const double target = ramp_target_at(*feeder, static_cast<int>(k) + 2);
      if (mag > target + 1e-6) out.ramp_certified = false;
    }
  }
  return out;
}

} // namespace

ScheduleOutcome optimal_schedule(const MicrogridInstance& inst, const FeederContext& feeder,
                                 double capability, const AnalysisOptions& options) {
  if (!(capability >= 0.0)) {
    throw std::invalid_argument("ramp capability must be nonnegative");
  }
  check_feeder(feeder, inst.time_grid.periods);
  return run_cost_model(inst, &feeder, capability, options);
}

ScheduleOutcome unconstrained_schedule(const MicrogridInstance& inst,
                                       const AnalysisOptions& options) {
  return run_cost_model(inst, nullptr, 0.0, options);
}

UtilityProfile utility_ramp_profile(const Schedule& schedule, const FeederContext& feeder) {
  const int T = schedule.periods;
  if (!feeder.customer_net_load.empty() &&
      static_cast<int>(feeder.customer_net_load.size()) != T) {
    throw std::invalid_argument("feeder length does not match the schedule");
  }
  UtilityProfile p;
  for (int t = 1; t <= T; ++t) {
    const std::size_t k = static_cast<std::size_t>(t) - 1;
    const double customers =
        feeder.customer_net_load.empty() ? 0.0 : feeder.customer_net_load[k];
    p.net.push_back(schedule.exchange[k] + customers);
  }
  for (int t = 2; t <= T; ++t) {
    p.ramp.push_back(p.net[static_cast<std::size_t>(t) - 1] -
                     p.net[static_cast<std::size_t>(t) - 2]);
  }
  return p;
}

SweepCurve capability_vs_line_capacity(const MicrogridInstance& inst,
                                       const std::vector<double>& capacities,
                                       const AnalysisOptions& options) {
  require_increasing(capacities, "line capacities");
  const int n = static_cast<int>(capacities.size());
  SweepCurve curve;
  curve.points.assign(static_cast<std::size_t>(n), {});

  AnalysisOptions inner = options;
  inner.workers = 1; // concurrency lives at the sweep level

  parallel_for(n, options.workers, [&](int i) {
    MicrogridInstance scenario = inst;
    scenario.grid_link.transfer_limit = capacities[static_cast<std::size_t>(i)];

    SweepPoint& pt = curve.points[static_cast<std::size_t>(i)];
    pt.parameter = capacities[static_cast<std::size_t>(i)];
    const CapabilityResult cap = ramping_capability(scenario, inner);
    pt.capability = cap.capability;
    pt.status = cap.status;
    if (cap.status == MILPStatus::infeasible) return;

    const ScheduleOutcome sched = unconstrained_schedule(scenario, inner);
    pt.cost = sched.ok() ? sched.cost : 0.0;
    if (!sched.ok()) {
      pt.status = sched.status;
    } else if (sched.status != MILPStatus::optimal && pt.status == MILPStatus::optimal) {
      pt.status = sched.status;
    }
  });
  return curve;
}

SweepCurve cost_vs_ramp_limit(const MicrogridInstance& inst, const FeederContext& feeder,
                              double capability, const std::vector<double>& deltas,
                              const AnalysisOptions& options) {
  require_increasing(deltas, "ramp targets");
  {
    // The per-point target overrides whatever the feeder carries, so only
    // the net-load series needs to be valid here.
    FeederContext probe = feeder;
    probe.ramp_target = {0.0};
    check_feeder(probe, inst.time_grid.periods);
  }
  const int n = static_cast<int>(deltas.size());
  SweepCurve curve;
  curve.points.assign(static_cast<std::size_t>(n), {});

  AnalysisOptions inner = options;
  inner.workers = 1;

  parallel_for(n, options.workers, [&](int i) {
    FeederContext scenario = feeder;
    scenario.ramp_target = {deltas[static_cast<std::size_t>(i)]};

    SweepPoint& pt = curve.points[static_cast<std::size_t>(i)];
    pt.parameter = deltas[static_cast<std::size_t>(i)];
    const ScheduleOutcome sched = optimal_schedule(inst, scenario, capability, inner);
    pt.status = sched.status;
    pt.cost = sched.ok() ? sched.cost : 0.0;
  });
  return curve;
}

} // namespace gridramp
