// Builds MILP models from a MicrogridInstance: component operating
// constraints, grid power balance and limits, and the two objective modes
// (operating cost, exchange-ramp extremization) plus utility ramp bands.
#ifndef GRIDRAMP_FORMULATION_HPP
#define GRIDRAMP_FORMULATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "gridramp/milp.hpp"
#include "gridramp/model.hpp"

namespace gridramp {

struct BuildOptions {
  // When set, every storage unit must end the horizon at or above its
  // initial energy. Off by default: the horizon end is left free.
  bool terminal_soc_at_least_initial = false;
};

struct BuiltModel {
  MILPModel model;
  VariableMap map;
};

// Creates all decision variables and the per-component operating
// constraints. Variable order is fixed: for each unit P, I, SU, SD over
// t = 1..T; for each storage Pdch, Pch, u, v, C; for each load D, z; then
// the exchange PM[t]. Throws std::invalid_argument if the instance fails
// validation.
BuiltModel build_component_constraints(const MicrogridInstance& instance,
                                       const BuildOptions& options = {});

// Per-period equality: units + storage net + fixed generation + exchange
// equals fixed load + adjustable loads.
void add_power_balance(MILPModel& model, const VariableMap& map,
                       const MicrogridInstance& instance);

// Symmetric exchange bounds [-limit, +limit]. Rejects negative limits.
void add_grid_limits(MILPModel& model, const VariableMap& map,
                     const MicrogridInstance& instance, double limit);

// Minimize generation cost (marginal + no-load + startup/shutdown) plus
// market purchases at the given prices. `prices` has one entry per period,
// or a single entry applied to all periods.
void set_cost_objective(MILPModel& model, const VariableMap& map,
                        const MicrogridInstance& instance,
                        const std::vector<double>& prices);

enum class RampDirection { up, down };

// Maximize the exchange swing into period t_star: up maximizes
// PM[t*] - PM[t*-1], down maximizes the negation. t_star = 1 needs the
// pre-horizon exchange on the grid link and is rejected without it.
void set_ramp_objective(MILPModel& model, const VariableMap& map,
                        const MicrogridInstance& instance, int t_star,
                        RampDirection direction);

// Reported when a requested ramp band is empty at some transition.
struct BandConflict {
  int period = 0;          // transition t (into period t)
  double lower = 0.0;      // requested band before clipping
  double upper = 0.0;
  double capability = 0.0; // R used for clipping
  bool exceeds_capability = false; // band valid but outside [-R, R]
  std::string message;
};

// Constrains each exchange transition to [delta_low, delta_up] clipped to
// [-capability, +capability]. Vectors are indexed by period (entry t-1 is
// the transition into period t); entry 0 applies only when the grid link
// carries a pre-horizon exchange. On an empty band no rows are added and
// the first offending transition is returned.
std::optional<BandConflict> add_ramp_band(MILPModel& model, const VariableMap& map,
                                          const MicrogridInstance& instance,
                                          const std::vector<double>& delta_low,
                                          const std::vector<double>& delta_up,
                                          double capability);

} // namespace gridramp

#endif // GRIDRAMP_FORMULATION_HPP
