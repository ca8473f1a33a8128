// Core domain types for a grid-connected microgrid scheduling problem:
// time grid, dispatchable units, energy storage, adjustable loads, fixed
// profiles, the utility interconnection, and the feeder-side context used
// for net-load ramp coordination.
#ifndef GRIDRAMP_MODEL_HPP
#define GRIDRAMP_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

namespace gridramp {

// Discrete scheduling horizon. Periods are 1-based in all interfaces;
// t-1 = 0 refers to initial conditions.
struct TimeGrid {
  int periods = 24;        // T
  double step_hours = 1.0; // tau
};

// Controllable generator with capacity, ramp, and min up/down limits.
struct DispatchableUnit {
  std::string id;
  double p_min = 0.0; // MW, output floor while committed
  double p_max = 0.0; // MW
  double marginal_cost = 0.0; // $/MWh
  double no_load_cost = 0.0;  // $/h while committed
  double startup_cost = 0.0;  // $ per start
  double shutdown_cost = 0.0; // $ per stop
  double ramp_up = 0.0;       // MW per period
  double ramp_down = 0.0;     // MW per period
  int min_up = 1;             // periods
  int min_down = 1;           // periods
  bool initial_committed = false;
  double initial_power = 0.0;      // MW, 0 when initially off
  int initial_state_duration = 0;  // periods already spent in current state
};

// Energy storage with mode-exclusive charge/discharge power bands and a
// stored-energy balance. Sign convention: net power > 0 while discharging.
struct StorageUnit {
  std::string id;
  double p_dch_min = 0.0; // MW while discharging
  double p_dch_max = 0.0;
  double p_ch_min = 0.0;  // MW while charging
  double p_ch_max = 0.0;
  double cap_min = 0.0;   // MWh
  double cap_max = 0.0;   // MWh
  double efficiency = 1.0; // (0, 1], applied to discharge
  double initial_energy = 0.0; // MWh
  int min_charge_time = 1;     // periods
  int min_discharge_time = 1;  // periods
  enum class Mode { idle, charging, discharging };
  Mode initial_mode = Mode::idle;
  int initial_mode_duration = 0;
};

// Deferrable demand: a per-period power band inside an operating window
// plus a total-energy requirement over the window.
struct AdjustableLoad {
  std::string id;
  std::vector<double> d_min; // MW, one entry per period
  std::vector<double> d_max; // MW
  double energy = 0.0;       // MWh over [window_start, window_end]
  int window_start = 1;      // alpha, 1-based inclusive
  int window_end = 1;        // beta, 1-based inclusive
  int min_on = 1;            // periods
  bool initial_operating = false;
  int initial_on_duration = 0;
};

// Aggregated uncontrollable demand and renewable injection inside the
// microgrid.
struct FixedProfiles {
  std::vector<double> fixed_load;          // MW per period
  std::vector<double> nondispatchable_gen; // MW per period
};

// Interconnection with the utility. Exchange > 0 imports into the
// microgrid.
struct GridLink {
  double transfer_limit = 0.0;                 // MW, symmetric
  std::optional<double> initial_exchange;      // MW at t = 0, optional
  std::vector<double> market_price;            // $/MWh per period
};

// Everything the utility sees besides the microgrid: aggregate customer
// net load on the same feeder, and the ramp target imposed per period
// transition.
struct FeederContext {
  std::vector<double> customer_net_load; // MW per period
  std::vector<double> ramp_target;       // MW per transition; size 1 broadcasts
};

struct MicrogridInstance {
  TimeGrid time_grid;
  std::vector<DispatchableUnit> dispatchable_units;
  std::vector<StorageUnit> storage_units;
  std::vector<AdjustableLoad> adjustable_loads;
  FixedProfiles fixed_profiles;
  GridLink grid_link;
};

struct ValidationIssue {
  std::string path;    // e.g. "storage_units[0].initial_energy"
  std::string message;
};

// Outcome of validate_instance. Violations block model construction;
// warnings flag data that is legal but likely unintended.
struct ValidationReport {
  std::vector<ValidationIssue> violations;
  std::vector<ValidationIssue> warnings;
  bool ok() const { return violations.empty(); }
};

// Checks every structural invariant of the instance. Pure; never throws.
ValidationReport validate_instance(const MicrogridInstance& instance);

// Broadcast helper: per-transition ramp target with a scalar fallback.
// Valid transition indices are 2..T.
double ramp_target_at(const FeederContext& feeder, int t);

} // namespace gridramp

#endif // GRIDRAMP_MODEL_HPP
