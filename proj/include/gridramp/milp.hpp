// Solver-agnostic mixed-integer linear program representation: typed
// variables with bounds, sparse linear rows, and a linear objective.
#ifndef GRIDRAMP_MILP_HPP
#define GRIDRAMP_MILP_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gridramp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary };
enum class RowSense { le, eq, ge };
enum class ObjSense { minimize, maximize };

struct Variable {
  std::string tag;   // semantic name, e.g. "P[g1,3]"
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInfinity;
};

struct Constraint {
  std::vector<std::pair<int, double>> coeffs; // (variable id, coefficient)
  RowSense sense = RowSense::le;
  double rhs = 0.0;
  std::string tag;
};

struct Objective {
  ObjSense sense = ObjSense::minimize;
  std::vector<std::pair<int, double>> coeffs;
  double constant = 0.0;
};

class MILPModel {
 public:
  int add_variable(std::string tag, VarKind kind, double lower, double upper) {
    if (kind == VarKind::binary && (lower < 0.0 || upper > 1.0))
      throw std::invalid_argument("binary variable bounds must lie within [0,1]: " + tag);
    if (lower > upper)
      throw std::invalid_argument("variable lower bound exceeds upper bound: " + tag);
    variables_.push_back({std::move(tag), kind, lower, upper});
    return static_cast<int>(variables_.size()) - 1;
  }

  void add_constraint(std::vector<std::pair<int, double>> coeffs, RowSense sense, double rhs,
                      std::string tag) {
    for (const auto& [id, coef] : coeffs) {
      check_var(id);
      if (!std::isfinite(coef))
        throw std::invalid_argument("non-finite coefficient in row " + tag);
    }
    if (!std::isfinite(rhs)) throw std::invalid_argument("non-finite rhs in row " + tag);
    constraints_.push_back({std::move(coeffs), sense, rhs, std::move(tag)});
  }

  void set_objective(ObjSense sense, std::vector<std::pair<int, double>> coeffs,
                     double constant = 0.0) {
    for (const auto& [id, coef] : coeffs) {
      check_var(id);
      if (!std::isfinite(coef)) throw std::invalid_argument("non-finite objective coefficient");
    }
    objective_ = {sense, std::move(coeffs), constant};
  }

  void set_bounds(int id, double lower, double upper) {
    check_var(id);
    if (lower > upper) throw std::invalid_argument("lower bound exceeds upper bound");
    variables_[id].lower = lower;
    variables_[id].upper = upper;
  }

  // Intersects the variable's bounds with [lower, upper]. Throws if the
  // result is empty.
  void tighten_bounds(int id, double lower, double upper) {
    check_var(id);
    auto& v = variables_[id];
    const double lo = std::max(v.lower, lower);
    const double hi = std::min(v.upper, upper);
    if (lo > hi)
      throw std::invalid_argument("bound tightening empties the domain of " + v.tag);
    v.lower = lo;
    v.upper = hi;
  }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Variable& variable(int id) const {
    check_var(id);
    return variables_[static_cast<std::size_t>(id)];
  }
  const Constraint& constraint(int i) const {
    return constraints_.at(static_cast<std::size_t>(i));
  }
  const Objective& objective() const { return objective_; }
  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }

  int num_binaries() const {
    int n = 0;
    for (const auto& v : variables_)
      if (v.kind == VarKind::binary) ++n;
    return n;
  }

 private:
  void check_var(int id) const {
    if (id < 0 || id >= num_variables())
      throw std::out_of_range("variable id " + std::to_string(id) + " out of range");
  }

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  Objective objective_;
};

// Bidirectional mapping between semantic tags and variable ids, plus typed
// index tables for the microgrid decision families used when decoding
// solutions. Component index is 0-based, period is 1-based.
class VariableMap {
 public:
  void insert(const std::string& tag, int id) {
    auto [it, fresh] = by_tag_.emplace(tag, id);
    if (!fresh) throw std::invalid_argument("duplicate variable tag " + tag);
    (void)it;
  }

  int id(const std::string& tag) const {
    auto it = by_tag_.find(tag);
    if (it == by_tag_.end()) throw std::out_of_range("unknown variable tag " + tag);
    return it->second;
  }

  bool contains(const std::string& tag) const { return by_tag_.count(tag) != 0; }
  std::size_t size() const { return by_tag_.size(); }

  int unit_power(int g, int t) const { return pick(unit_power_, g, t); }
  int unit_on(int g, int t) const { return pick(unit_on_, g, t); }
  int unit_startup(int g, int t) const { return pick(unit_startup_, g, t); }
  int unit_shutdown(int g, int t) const { return pick(unit_shutdown_, g, t); }
  int storage_discharge(int s, int t) const { return pick(storage_discharge_, s, t); }
  int storage_charge(int s, int t) const { return pick(storage_charge_, s, t); }
  int storage_dch_on(int s, int t) const { return pick(storage_dch_on_, s, t); }
  int storage_ch_on(int s, int t) const { return pick(storage_ch_on_, s, t); }
  int storage_energy(int s, int t) const { return pick(storage_energy_, s, t); }
  int load_power(int d, int t) const { return pick(load_power_, d, t); }
  int load_on(int d, int t) const { return pick(load_on_, d, t); }
  int grid_exchange(int t) const { return grid_exchange_.at(static_cast<std::size_t>(t) - 1); }

  // Table construction; used by the formulation layer only.
  struct Tables {
    std::vector<std::vector<int>>& unit_power;
    std::vector<std::vector<int>>& unit_on;
    std::vector<std::vector<int>>& unit_startup;
    std::vector<std::vector<int>>& unit_shutdown;
    std::vector<std::vector<int>>& storage_discharge;
    std::vector<std::vector<int>>& storage_charge;
    std::vector<std::vector<int>>& storage_dch_on;
    std::vector<std::vector<int>>& storage_ch_on;
    std::vector<std::vector<int>>& storage_energy;
    std::vector<std::vector<int>>& load_power;
    std::vector<std::vector<int>>& load_on;
    std::vector<int>& grid_exchange;
  };
  Tables tables() {
    return {unit_power_,  unit_on_,      unit_startup_,     unit_shutdown_,
            storage_discharge_, storage_charge_, storage_dch_on_, storage_ch_on_,
            storage_energy_,    load_power_,     load_on_,        grid_exchange_};
  }

 private:
  static int pick(const std::vector<std::vector<int>>& table, int comp, int t) {
    return table.at(static_cast<std::size_t>(comp)).at(static_cast<std::size_t>(t) - 1);
  }

  std::map<std::string, int> by_tag_;
  std::vector<std::vector<int>> unit_power_, unit_on_, unit_startup_, unit_shutdown_;
  std::vector<std::vector<int>> storage_discharge_, storage_charge_, storage_dch_on_,
      storage_ch_on_, storage_energy_;
  std::vector<std::vector<int>> load_power_, load_on_;
  std::vector<int> grid_exchange_;
};

} // namespace gridramp

#endif // GRIDRAMP_MILP_HPP
