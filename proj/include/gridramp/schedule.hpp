// Decoded dispatch schedule: per-period decisions for every component
// plus a cost breakdown, reconstructed from a solver value vector.
#ifndef GRIDRAMP_SCHEDULE_HPP
#define GRIDRAMP_SCHEDULE_HPP

#include <string>
#include <vector>

#include "gridramp/milp.hpp"
#include "gridramp/model.hpp"

namespace gridramp {

// All per-period vectors have one entry per period; index t-1 holds
// period t.
struct UnitSchedule {
  std::string id;
  std::vector<double> power;    // MW
  std::vector<int> committed;   // 0/1
  std::vector<double> startup;  // $ incurred entering this period
  std::vector<double> shutdown; // $
};

struct StorageSchedule {
  std::string id;
  std::vector<double> discharge; // MW
  std::vector<double> charge;    // MW
  std::vector<int> discharging;  // 0/1
  std::vector<int> charging;     // 0/1
  std::vector<double> energy;    // MWh at the end of the period
};

struct LoadSchedule {
  std::string id;
  std::vector<double> power;   // MW
  std::vector<int> operating;  // 0/1
};

struct CostBreakdown {
  double generation = 0.0;       // marginal energy plus no-load cost
  double startup_shutdown = 0.0;
  double purchase = 0.0;         // market exchange; negative means revenue
  double total = 0.0;
};

struct Schedule {
  int periods = 0;
  double step_hours = 1.0;
  std::vector<UnitSchedule> units;
  std::vector<StorageSchedule> storage;
  std::vector<LoadSchedule> loads;
  std::vector<double> exchange; // MW, positive imports
  CostBreakdown cost;
};

// Reads a solver value vector back into component series and recomputes
// the cost breakdown. `prices` may have one entry per period, a single
// broadcast entry, or be empty (no purchase cost accounted).
Schedule decode_schedule(const MicrogridInstance& instance, const VariableMap& map,
                         const std::vector<double>& values,
                         const std::vector<double>& prices);

// Re-validates a schedule against every operating rule of the instance,
// independently of how it was produced: capacity and rated-power bands,
// ramp limits, minimum durations (including pre-horizon obligations),
// storage energy balance and limits, load windows and energy targets,
// power balance, and the interconnection limit. Returns one issue per
// violated rule; empty means certified.
std::vector<ValidationIssue> check_schedule(const MicrogridInstance& instance,
                                            const Schedule& schedule, double tol = 1e-6);

} // namespace gridramp

#endif // GRIDRAMP_SCHEDULE_HPP
