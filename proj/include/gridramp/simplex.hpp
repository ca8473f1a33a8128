// Bounded-variable revised simplex over the MILPModel representation.
// Binaries are treated as continuous within their bounds; integrality is
// the branch-and-bound layer's job.
#ifndef GRIDRAMP_SIMPLEX_HPP
#define GRIDRAMP_SIMPLEX_HPP

#include <cstdint>
#include <vector>

#include "gridramp/milp.hpp"

namespace gridramp {

enum class LPStatus { optimal, infeasible, unbounded, failure };

struct LPSolution {
  LPStatus status = LPStatus::failure;
  std::vector<double> values; // one entry per model variable
  double objective = 0.0;     // in the model's objective sense
};

struct SimplexOptions {
  double feasibility_tol = 1e-7; // absolute, in variable units
  double optimality_tol = 1e-9;  // reduced-cost threshold
  int refactor_interval = 100;   // pivots between basis reinversions
  long max_degenerate = 1000;    // consecutive degenerate pivots before Bland's rule
};

// Reusable engine: load a model once, then re-solve under different
// variable bounds. Row storage, the eta file, and work vectors persist
// across solves, which keeps per-node work small inside branch-and-bound.
class SimplexEngine {
 public:
  explicit SimplexEngine(SimplexOptions options = {}) : options_(options) {}

  // Builds the equality-form matrix (one logical column per row) and the
  // base bounds. Singleton rows are folded into variable bounds instead of
  // materializing as rows.
  void load(const MILPModel& model);

  int num_structural() const { return n_struct_; }
  bool loaded_infeasible() const { return load_infeasible_; }

  // Working-bound control. reset_bounds restores the post-load bounds;
  // restrict_bounds intersects and reports an empty result instead of
  // throwing, because empty domains are an expected branch-and-bound
  // outcome.
  void reset_bounds();
  bool restrict_bounds(int var, double lower, double upper);

  struct Result {
    LPStatus status = LPStatus::failure;
    double objective = 0.0; // internal minimization value, without constant
    long iterations = 0;
  };

  Result solve();                   // cold start from the all-logical basis
  Result solve_warm();              // continue from the current basis state
  std::vector<std::uint8_t> save_basis() const;
  // Returns false (and falls back to a cold state) if the snapshot does
  // not match the loaded model.
  bool load_basis(const std::vector<std::uint8_t>& statuses);

  double value(int var) const { return x_[var]; }
  void extract_values(std::vector<double>& out) const;

 private:
  enum Status : std::uint8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFree = 3 };

  struct Eta {
    int pos = 0;
    std::vector<std::pair<int, double>> column; // includes the pivot entry
  };

  void build_cold_basis();
  bool reinvert();                 // rebuild the eta file for the current basis
  void compute_basic_values();
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  Result run();                    // phases 1 and 2 from the current state
  int price(const std::vector<double>& y, bool phase_one, bool bland, int& direction) const;
  void snap_nonbasic_into_bounds();
  double infeasibility(int j) const;

  SimplexOptions options_;

  // Equality-form problem data. Columns 0..n_struct-1 are structural,
  // n_struct..n-1 are logicals (identity coefficient on their row).
  int n_struct_ = 0;
  int m_ = 0;
  int n_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_; // structural sparse columns
  std::vector<double> rhs_;
  std::vector<double> cost_;      // internal minimization costs (structural only)
  std::vector<double> base_lo_, base_hi_;
  std::vector<double> lo_, hi_;   // working bounds
  bool load_infeasible_ = false;

  // Basis state.
  std::vector<std::uint8_t> status_;
  std::vector<int> basic_var_;    // basis position -> variable
  std::vector<int> pos_of_;       // variable -> basis position or -1
  std::vector<double> x_;
  std::vector<Eta> etas_;
  int pivots_since_reinvert_ = 0;
  bool basis_valid_ = false;

  // Work vectors reused across iterations.
  mutable std::vector<double> work_col_, work_y_, work_res_;
};

// One-shot interface used outside branch-and-bound.
LPSolution solve_lp(const MILPModel& model, const SimplexOptions& options = {});

} // namespace gridramp

#endif // GRIDRAMP_SIMPLEX_HPP
