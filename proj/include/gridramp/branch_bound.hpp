// Branch-and-bound over the binaries of a MILPModel, with LP relaxations
// from the bounded simplex engine. Node selection is best-bound with
// depth-first plunging; branching picks the most fractional binary.
#ifndef GRIDRAMP_BRANCH_BOUND_HPP
#define GRIDRAMP_BRANCH_BOUND_HPP

#include <string>
#include <vector>

#include "gridramp/milp.hpp"

namespace gridramp {

enum class MILPStatus {
  optimal,       // incumbent proven within the gap tolerance
  feasible,      // search truncated by a limit; incumbent available
  infeasible,    // root relaxation or the full tree proves infeasibility
  unbounded,     // root relaxation unbounded
  limit_reached, // search truncated with no incumbent
};

struct MILPSolution {
  MILPStatus status = MILPStatus::limit_reached;
  std::vector<double> values; // incumbent, one entry per model variable
  double objective = 0.0;     // model sense; meaningful when an incumbent exists
  double best_bound = 0.0;    // model sense
  double gap = 0.0;           // |objective - best_bound| / max(1, |objective|)
  long node_count = 0;
  double wall_time_seconds = 0.0;
  double root_lp_objective = 0.0;      // relaxation value, model sense
  std::vector<double> bound_history;   // global bound after each node, model sense

  bool has_incumbent() const {
    return status == MILPStatus::optimal || status == MILPStatus::feasible;
  }
};

struct SolveOptions {
  double gap_tol = 1e-6;         // relative
  double integrality_tol = 1e-6;
  double feasibility_tol = 1e-7; // absolute, forwarded to the LP engine
  long node_limit = 0;           // 0 = unlimited
  double time_limit_seconds = 0; // 0 = unlimited
  int workers = 1;
};

MILPSolution solve_milp(const MILPModel& model, const SolveOptions& options = {});

// Any object with this interface can stand in for the built-in engine.
class MilpBackend {
 public:
  virtual ~MilpBackend() = default;
  virtual std::string name() const = 0;
  virtual MILPSolution solve(const MILPModel& model, const SolveOptions& options) const = 0;
};

// Registry of available backends. "bnb" is the built-in branch-and-bound
// and the default.
const MilpBackend* find_backend(const std::string& name);
const MilpBackend& builtin_backend();
std::vector<std::string> backend_names();

} // namespace gridramp

#endif // GRIDRAMP_BRANCH_BOUND_HPP
