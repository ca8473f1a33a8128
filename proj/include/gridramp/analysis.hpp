// The two top-level procedures: guaranteed exchange-ramping capability
// (min over transitions of the max achievable swing) and ramp-constrained
// cost-optimal scheduling, plus the parameter sweeps built on them.
#ifndef GRIDRAMP_ANALYSIS_HPP
#define GRIDRAMP_ANALYSIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "gridramp/branch_bound.hpp"
#include "gridramp/formulation.hpp"
#include "gridramp/model.hpp"
#include "gridramp/schedule.hpp"

namespace gridramp {

struct AnalysisOptions {
  SolveOptions solver;  // per-MILP settings
  BuildOptions build;
  int workers = 1;      // concurrency across independent solves
  const MilpBackend* backend = nullptr; // null uses the built-in engine
  std::string lp_dump_path; // when set, scheduling models are dumped here
};

struct CapabilitySolve {
  int period = 0;
  RampDirection direction = RampDirection::up;
  MILPStatus status = MILPStatus::limit_reached;
  double objective = 0.0;
  long nodes = 0;
};

struct CapabilityResult {
  MILPStatus status = MILPStatus::limit_reached;
  double capability = 0.0; // R: guaranteed swing, MW per transition
  int argmin_period = 0;   // first transition attaining the minimum
  std::vector<int> periods; // evaluated transitions, ascending
  std::vector<double> up;   // max achievable PM[t] - PM[t-1]
  std::vector<double> down; // max achievable PM[t-1] - PM[t]
  std::vector<CapabilitySolve> solves;
};

// Solves two directional exchange-swing MILPs per transition (2..T, plus
// 1 when the link carries a pre-horizon exchange) and takes the min over
// transitions of the per-transition best direction.
CapabilityResult ramping_capability(const MicrogridInstance& instance,
                                    const AnalysisOptions& options = {});

// Per-transition exchange-change band implied by the utility ramp target
// and the feeder customers' net-load change: entry t-1 holds
// [-target - change, target - change] for the transition into period t.
// Entry 0 (into period 1) assumes no prior customer change and is used
// only when a pre-horizon exchange is given.
struct RampBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};
RampBounds compute_ramp_bounds(const FeederContext& feeder, int periods);

enum class ScheduleFailure {
  none,
  empty_band,         // some transition band is empty before solving
  ramp_unattainable,  // bands nonempty but jointly unreachable
  balance_infeasible, // no dispatch satisfies the power balance at all
  solver_limit,
};

struct ScheduleOutcome {
  MILPStatus status = MILPStatus::limit_reached;
  ScheduleFailure failure = ScheduleFailure::none;
  std::optional<BandConflict> band_conflict;
  std::string message;
  Schedule schedule; // valid when an incumbent exists
  double cost = 0.0;
  std::vector<double> utility_net;  // microgrid exchange + customer net load
  std::vector<double> utility_ramp; // entry k: change into period k+2
  double max_abs_utility_ramp = 0.0;
  bool ramp_certified = false; // |utility ramp| within target everywhere
  MILPSolution solver;

  bool ok() const {
    return status == MILPStatus::optimal || status == MILPStatus::feasible;
  }
};

// Minimizes operating cost subject to all component constraints, the power
// balance, the line limit, and the per-transition exchange band clipped to
// [-capability, +capability].
ScheduleOutcome optimal_schedule(const MicrogridInstance& instance,
                                 const FeederContext& feeder, double capability,
                                 const AnalysisOptions& options = {});

// Same model without any exchange-ramp rows; the cost floor.
ScheduleOutcome unconstrained_schedule(const MicrogridInstance& instance,
                                       const AnalysisOptions& options = {});

struct UtilityProfile {
  std::vector<double> net;  // exchange + customer net load, per period
  std::vector<double> ramp; // successive differences, one per transition
};
UtilityProfile utility_ramp_profile(const Schedule& schedule, const FeederContext& feeder);

struct SweepPoint {
  double parameter = 0.0;
  MILPStatus status = MILPStatus::limit_reached;
  double capability = 0.0; // filled by the line-capacity sweep
  double cost = 0.0;
};

struct SweepCurve {
  std::vector<SweepPoint> points; // parameters strictly increasing
};

// For each line capacity: override the link limit, then compute the
// ramping capability and the unconstrained operating cost.
SweepCurve capability_vs_line_capacity(const MicrogridInstance& instance,
                                       const std::vector<double>& capacities,
                                       const AnalysisOptions& options = {});

// For each ramp target: schedule against the feeder with that target and
// the given capability; emits (target, cost, status).
SweepCurve cost_vs_ramp_limit(const MicrogridInstance& instance, const FeederContext& feeder,
                              double capability, const std::vector<double>& deltas,
                              const AnalysisOptions& options = {});

} // namespace gridramp

#endif // GRIDRAMP_ANALYSIS_HPP
