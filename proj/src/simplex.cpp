#include "gridramp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gridramp {

namespace {
constexpr double kDropTol = 1e-13;   // eta entries below this are discarded
constexpr double kPivotTol = 1e-9;   // minimum acceptable pivot magnitude
constexpr double kDegenTol = 1e-11;  // step sizes below this count as degenerate
} // namespace

void SimplexEngine::load(const MILPModel& model) {
  n_struct_ = model.num_variables();
  load_infeasible_ = false;
  basis_valid_ = false;
  etas_.clear();

  base_lo_.assign(n_struct_, 0.0);
  base_hi_.assign(n_struct_, 0.0);
  for (int j = 0; j < n_struct_; ++j) {
    base_lo_[j] = model.variables()[j].lower;
    base_hi_[j] = model.variables()[j].upper;
  }

  // Internal sense is minimization.
  const double sign = model.objective().sense == ObjSense::maximize ? -1.0 : 1.0;
  std::vector<double> struct_cost(n_struct_, 0.0);
  for (const auto& [id, coef] : model.objective().coeffs) struct_cost[id] += sign * coef;

  // Assemble rows, folding singleton rows into bounds. Coefficients are
  // merged per variable so duplicate entries in a row behave additively.
  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    RowSense sense;
    double rhs;
  };
  std::vector<Row> kept;
  kept.reserve(model.constraints().size());
  std::vector<std::pair<int, double>> merged;
  for (const auto& row : model.constraints()) {
    merged.assign(row.coeffs.begin(), row.coeffs.end());
    std::sort(merged.begin(), merged.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, double>> compact;
    for (const auto& [id, coef] : merged) {
      if (!compact.empty() && compact.back().first == id)
        compact.back().second += coef;
      else
        compact.emplace_back(id, coef);
    }
    std::erase_if(compact, [](const auto& e) { return e.second == 0.0; });

    if (compact.empty()) {
      const bool ok = (row.sense == RowSense::le && 0.0 <= row.rhs + 1e-9) ||
                      (row.sense == RowSense::ge && 0.0 >= row.rhs - 1e-9) ||
                      (row.sense == RowSense::eq && std::abs(row.rhs) <= 1e-9);
      if (!ok) load_infeasible_ = true;
      continue;
    }
    if (compact.size() == 1) {
      const auto [id, coef] = compact.front();
      double lo = -kInfinity, hi = kInfinity;
      switch (row.sense) {
        case RowSense::le: (coef > 0 ? hi : lo) = row.rhs / coef; break;
        case RowSense::ge: (coef > 0 ? lo : hi) = row.rhs / coef; break;
        case RowSense::eq: lo = hi = row.rhs / coef; break;
      }
      base_lo_[id] = std::max(base_lo_[id], lo);
      base_hi_[id] = std::min(base_hi_[id], hi);
      if (base_lo_[id] > base_hi_[id] + 1e-12) load_infeasible_ = true;
      continue;
    }
    kept.push_back({std::move(compact), row.sense, row.rhs});
  }

  m_ = static_cast<int>(kept.size());
  n_ = n_struct_ + m_;
  cols_.assign(n_struct_, {});
  rhs_.assign(m_, 0.0);
  base_lo_.resize(n_, 0.0);
  base_hi_.resize(n_, 0.0);
  cost_.assign(n_, 0.0);
  for (int j = 0; j < n_struct_; ++j) cost_[j] = struct_cost[j];

  for (int r = 0; r < m_; ++r) {
    rhs_[r] = kept[r].rhs;
    for (const auto& [id, coef] : kept[r].coeffs) cols_[id].emplace_back(r, coef);
    const int logical = n_struct_ + r;
    switch (kept[r].sense) {
      case RowSense::le: base_lo_[logical] = 0.0; base_hi_[logical] = kInfinity; break;
      case RowSense::ge: base_lo_[logical] = -kInfinity; base_hi_[logical] = 0.0; break;
      case RowSense::eq: base_lo_[logical] = 0.0; base_hi_[logical] = 0.0; break;
    }
  }

  lo_ = base_lo_;
  hi_ = base_hi_;
  status_.assign(n_, kAtLower);
  pos_of_.assign(n_, -1);
  basic_var_.assign(m_, -1);
  x_.assign(n_, 0.0);
  work_col_.assign(m_, 0.0);
  work_y_.assign(m_, 0.0);
  work_res_.assign(m_, 0.0);
}

void SimplexEngine::reset_bounds() {
  lo_ = base_lo_;
  hi_ = base_hi_;
}

bool SimplexEngine::restrict_bounds(int var, double lower, double upper) {
  lo_[var] = std::max(lo_[var], lower);
  hi_[var] = std::min(hi_[var], upper);
  return lo_[var] <= hi_[var] + 1e-12;
}

void SimplexEngine::build_cold_basis() {
  etas_.clear();
  pivots_since_reinvert_ = 0;
  for (int j = 0; j < n_struct_; ++j) {
    status_[j] = kAtLower;
    pos_of_[j] = -1;
  }
  for (int r = 0; r < m_; ++r) {
    const int logical = n_struct_ + r;
    status_[logical] = kBasic;
    pos_of_[logical] = r;
    basic_var_[r] = logical;
  }
  basis_valid_ = true;
  snap_nonbasic_into_bounds();
  compute_basic_values();
}

void SimplexEngine::snap_nonbasic_into_bounds() {
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == kBasic) continue;
    const double lo = lo_[j], hi = hi_[j];
    if (lo == hi) {
      status_[j] = kAtLower;
      x_[j] = lo;
    } else if (status_[j] == kAtUpper && hi < kInfinity) {
      x_[j] = hi;
    } else if (status_[j] == kAtLower && lo > -kInfinity) {
      x_[j] = lo;
    } else if (lo > -kInfinity && (hi == kInfinity || std::abs(lo) <= std::abs(hi))) {
      status_[j] = kAtLower;
      x_[j] = lo;
    } else if (hi < kInfinity) {
      status_[j] = kAtUpper;
      x_[j] = hi;
    } else {
      status_[j] = kFree;
      x_[j] = 0.0;
    }
  }
}

void SimplexEngine::ftran(std::vector<double>& v) const {
  for (const Eta& e : etas_) {
    const double t = v[e.pos];
    if (t == 0.0) continue;
    v[e.pos] = 0.0;
    for (const auto& [i, mult] : e.column) v[i] += t * mult;
  }
}

void SimplexEngine::btran(std::vector<double>& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double dot = 0.0;
    for (const auto& [i, mult] : it->column) dot += mult * v[i];
    v[it->pos] = dot;
  }
}

bool SimplexEngine::reinvert() {
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<int> members;
    members.reserve(m_);
    for (int j = 0; j < n_; ++j)
      if (status_[j] == kBasic) members.push_back(j);
    if (static_cast<int>(members.size()) != m_) return false;

    // Logical columns first, then structural columns by ascending density.
    std::stable_sort(members.begin(), members.end(), [&](int a, int b) {
      const std::size_t na = a >= n_struct_ ? 1 : cols_[a].size();
      const std::size_t nb = b >= n_struct_ ? 1 : cols_[b].size();
      if (na != nb) return na < nb;
      return a < b;
    });

    etas_.clear();
    pivots_since_reinvert_ = 0;
    std::vector<bool> row_used(m_, false);
    std::fill(basic_var_.begin(), basic_var_.end(), -1);
    std::vector<int> unplaced;

    std::vector<double>& w = work_col_;
    for (int j : members) {
      std::fill(w.begin(), w.end(), 0.0);
      if (j >= n_struct_)
        w[j - n_struct_] = 1.0;
      else
        for (const auto& [r, coef] : cols_[j]) w[r] = coef;
      ftran(w);

      int pivot_row = -1;
      double best = kPivotTol * 10.0;
      for (int r = 0; r < m_; ++r) {
        if (row_used[r]) continue;
        const double a = std::abs(w[r]);
        if (a > best) {
          best = a;
          pivot_row = r;
        }
      }
      if (pivot_row < 0) {
        unplaced.push_back(j);
        continue;
      }
      row_used[pivot_row] = true;
      basic_var_[pivot_row] = j;
      pos_of_[j] = pivot_row;

      const double pivot = w[pivot_row];
      Eta e;
      e.pos = pivot_row;
      e.column.emplace_back(pivot_row, 1.0 / pivot);
      for (int r = 0; r < m_; ++r) {
        if (r == pivot_row) continue;
        const double mult = -w[r] / pivot;
        if (std::abs(mult) > kDropTol) e.column.emplace_back(r, mult);
      }
      if (e.column.size() > 1 || std::abs(pivot - 1.0) > kDropTol) etas_.push_back(std::move(e));
    }

    if (unplaced.empty()) {
      bool filled = true;
      for (int r = 0; r < m_; ++r)
        if (basic_var_[r] < 0) filled = false;
      if (filled) {
        basis_valid_ = true;
        return true;
      }
    }

    // Singular basis: evict unplaced columns, patch holes with logicals,
    // and retry once.
    for (int j : unplaced) {
      status_[j] = kAtLower;
      pos_of_[j] = -1;
    }
    for (int r = 0; r < m_; ++r) {
      if (basic_var_[r] >= 0) continue;
      status_[n_struct_ + r] = kBasic;
    }
    snap_nonbasic_into_bounds();
  }
  build_cold_basis();
  return true;
}

void SimplexEngine::compute_basic_values() {
  std::vector<double>& res = work_res_;
  res.assign(m_, 0.0);
  for (int r = 0; r < m_; ++r) res[r] = rhs_[r];
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == kBasic || x_[j] == 0.0) continue;
    if (j >= n_struct_) {
      res[j - n_struct_] -= x_[j];
    } else {
      for (const auto& [r, coef] : cols_[j]) res[r] -= coef * x_[j];
    }
  }
  ftran(res);
  for (int r = 0; r < m_; ++r) x_[basic_var_[r]] = res[r];
}

double SimplexEngine::infeasibility(int j) const {
  if (x_[j] < lo_[j]) return lo_[j] - x_[j];
  if (x_[j] > hi_[j]) return x_[j] - hi_[j];
  return 0.0;
}

int SimplexEngine::price(const std::vector<double>& y, bool phase_one, bool bland,
                         int& direction) const {
  const double tol = options_.optimality_tol;
  int best = -1;
  double best_score = tol;
  int best_dir = 0;
  for (int j = 0; j < n_; ++j) {
    const auto st = status_[j];
    if (st == kBasic) continue;
    if (hi_[j] - lo_[j] <= 0.0) continue; // fixed
    double d = phase_one ? 0.0 : cost_[j];
    if (j >= n_struct_) {
      d -= y[j - n_struct_];
    } else {
      for (const auto& [r, coef] : cols_[j]) d -= coef * y[r];
    }
    double score = 0.0;
    int dir = 0;
    if ((st == kAtLower || st == kFree) && d < -tol) {
      score = -d;
      dir = +1;
    }
    if ((st == kAtUpper || st == kFree) && d > tol && d > score) {
      score = d;
      dir = -1;
    }
    if (dir == 0) continue;
    if (bland) {
      direction = dir;
      return j;
    }
    if (score > best_score) {
      best_score = score;
      best = j;
      best_dir = dir;
    }
  }
  direction = best_dir;
  return best;
}

SimplexEngine::Result SimplexEngine::run() {
  Result result;
  const double ftol = options_.feasibility_tol;
  const long iter_limit = 20000 + 50L * m_;
  long consecutive_degenerate = 0;
  bool bland = false;
  bool just_refreshed = false;

  std::vector<double>& y = work_y_;
  std::vector<double>& w = work_col_;

  while (true) {
    if (++result.iterations > iter_limit) {
      result.status = LPStatus::failure;
      return result;
    }

    double max_infeas = 0.0;
    for (int r = 0; r < m_; ++r)
      max_infeas = std::max(max_infeas, infeasibility(basic_var_[r]));
    const bool phase_one = max_infeas > ftol;

    y.assign(m_, 0.0);
    if (phase_one) {
      for (int r = 0; r < m_; ++r) {
        const int j = basic_var_[r];
        if (x_[j] < lo_[j] - ftol)
          y[r] = -1.0;
        else if (x_[j] > hi_[j] + ftol)
          y[r] = 1.0;
      }
    } else {
      for (int r = 0; r < m_; ++r) y[r] = cost_[basic_var_[r]];
    }
    btran(y);

    int dir = 0;
    const int q = price(y, phase_one, bland, dir);
    if (q < 0) {
      // No improving candidate: phase-1 optimum certifies infeasibility,
      // phase-2 optimum is the answer. Accept a claim only after it
      // survives a fresh factorization, so accumulated eta drift cannot
      // produce a wrong verdict.
      if (!just_refreshed) {
        if (!reinvert()) {
          result.status = LPStatus::failure;
          return result;
        }
        compute_basic_values();
        just_refreshed = true;
        continue;
      }
      if (phase_one) {
        result.status = LPStatus::infeasible;
        return result;
      }
      result.status = LPStatus::optimal;
      double obj = 0.0;
      for (int j = 0; j < n_struct_; ++j)
        if (cost_[j] != 0.0) obj += cost_[j] * x_[j];
      result.objective = obj;
      return result;
    }
    just_refreshed = false;

    std::fill(w.begin(), w.end(), 0.0);
    if (q >= n_struct_)
      w[q - n_struct_] = 1.0;
    else
      for (const auto& [r, coef] : cols_[q]) w[r] = coef;
    ftran(w);

    // Blocking step of the basic variable at row r, or infinity. Infeasible
    // basic variables block on the bound that restores their feasibility;
    // feasible ones block on the bound they are pushed toward.
    auto blocking_step = [&](int r, bool& to_upper) -> double {
      if (std::abs(w[r]) < kPivotTol) return kInfinity;
      const int i = basic_var_[r];
      const double rate = -dir * w[r];
      double step;
      if (x_[i] < lo_[i] - ftol) {
        if (rate <= 0.0) return kInfinity;
        step = (lo_[i] - x_[i]) / rate;
        to_upper = false;
      } else if (x_[i] > hi_[i] + ftol) {
        if (rate >= 0.0) return kInfinity;
        step = (hi_[i] - x_[i]) / rate;
        to_upper = true;
      } else if (rate < 0.0) {
        if (lo_[i] == -kInfinity) return kInfinity;
        step = (x_[i] - lo_[i]) / (-rate);
        to_upper = false;
      } else {
        if (hi_[i] == kInfinity) return kInfinity;
        step = (hi_[i] - x_[i]) / rate;
        to_upper = true;
      }
      return std::max(step, 0.0);
    };

    const double flip_step = hi_[q] - lo_[q]; // may be infinite
    double theta = kInfinity;
    for (int r = 0; r < m_; ++r) {
      bool up;
      theta = std::min(theta, blocking_step(r, up));
    }

    if (flip_step < theta - 1e-12) {
      // Bound flip: no basis change.
      x_[q] = dir > 0 ? hi_[q] : lo_[q];
      status_[q] = dir > 0 ? kAtUpper : kAtLower;
      for (int r = 0; r < m_; ++r)
        if (w[r] != 0.0) x_[basic_var_[r]] -= dir * flip_step * w[r];
      consecutive_degenerate = 0;
      bland = false;
      continue;
    }

    if (theta == kInfinity) {
      result.status = phase_one ? LPStatus::failure : LPStatus::unbounded;
      return result;
    }

    // Among blockers near the minimal step pick the most stable pivot
    // (largest magnitude), breaking ties toward the lowest variable id.
    // Bland mode takes the lowest-id blocker outright.
    int leave_row = -1;
    bool leave_to_upper = false;
    double best_mag = 0.0;
    int best_id = n_;
    for (int r = 0; r < m_; ++r) {
      bool up;
      const double step = blocking_step(r, up);
      if (step > theta + 1e-12) continue;
      const int i = basic_var_[r];
      const double mag = std::abs(w[r]);
      const bool better = bland ? (i < best_id)
                                : (mag > best_mag + kDropTol ||
                                   (std::abs(mag - best_mag) <= kDropTol && i < best_id));
      if (better) {
        best_mag = mag;
        best_id = i;
        leave_row = r;
        leave_to_upper = up;
      }
    }
    if (leave_row < 0) {
      result.status = LPStatus::failure;
      return result;
    }

    const int leave = basic_var_[leave_row];
    x_[q] += dir * theta;
    for (int r = 0; r < m_; ++r)
      if (w[r] != 0.0) x_[basic_var_[r]] -= dir * theta * w[r];

    // The leaving variable exits exactly on the bound the ratio test hit.
    status_[leave] = leave_to_upper ? kAtUpper : kAtLower;
    x_[leave] = leave_to_upper ? hi_[leave] : lo_[leave];
    pos_of_[leave] = -1;
    status_[q] = kBasic;
    pos_of_[q] = leave_row;
    basic_var_[leave_row] = q;

    const double pivot = w[leave_row];
    Eta e;
    e.pos = leave_row;
    e.column.emplace_back(leave_row, 1.0 / pivot);
    for (int r = 0; r < m_; ++r) {
      if (r == leave_row || w[r] == 0.0) continue;
      const double mult = -w[r] / pivot;
      if (std::abs(mult) > kDropTol) e.column.emplace_back(r, mult);
    }
    etas_.push_back(std::move(e));

    if (theta <= kDegenTol) {
      if (++consecutive_degenerate >= options_.max_degenerate) bland = true;
    } else {
      consecutive_degenerate = 0;
      bland = false;
    }

    if (++pivots_since_reinvert_ >= options_.refactor_interval) {
      if (!reinvert()) {
        result.status = LPStatus::failure;
        return result;
      }
      compute_basic_values();
    }
  }
}

SimplexEngine::Result SimplexEngine::solve() {
  if (load_infeasible_) return {LPStatus::infeasible, 0.0, 0};
  for (int j = 0; j < n_; ++j)
    if (lo_[j] > hi_[j] + 1e-12) return {LPStatus::infeasible, 0.0, 0};
  build_cold_basis();
  return run();
}

SimplexEngine::Result SimplexEngine::solve_warm() {
  if (load_infeasible_) return {LPStatus::infeasible, 0.0, 0};
  for (int j = 0; j < n_; ++j)
    if (lo_[j] > hi_[j] + 1e-12) return {LPStatus::infeasible, 0.0, 0};
  if (!basis_valid_) {
    int basics = 0;
    for (int j = 0; j < n_; ++j)
      if (status_[j] == kBasic) ++basics;
    if (basics != m_ || !reinvert()) {
      build_cold_basis();
      return run();
    }
  }
  snap_nonbasic_into_bounds();
  compute_basic_values();
  return run();
}

std::vector<std::uint8_t> SimplexEngine::save_basis() const {
  return {status_.begin(), status_.end()};
}

bool SimplexEngine::load_basis(const std::vector<std::uint8_t>& statuses) {
  if (static_cast<int>(statuses.size()) != n_) return false;
  int basics = 0;
  for (auto s : statuses)
    if (s == kBasic) ++basics;
  if (basics != m_) return false;
  std::copy(statuses.begin(), statuses.end(), status_.begin());
  std::fill(pos_of_.begin(), pos_of_.end(), -1);
  basis_valid_ = false; // solve_warm reinverts from the snapshot
  return true;
}

void SimplexEngine::extract_values(std::vector<double>& out) const {
  out.assign(x_.begin(), x_.begin() + n_struct_);
}

LPSolution solve_lp(const MILPModel& model, const SimplexOptions& options) {
  SimplexEngine engine(options);
  engine.load(model);
  const auto res = engine.solve();

  LPSolution solution;
  solution.status = res.status;
  if (res.status == LPStatus::optimal) {
    engine.extract_values(solution.values);
    const double sign = model.objective().sense == ObjSense::maximize ? -1.0 : 1.0;
    solution.objective = sign * res.objective + model.objective().constant;
  }
  return solution;
}

} // namespace gridramp
