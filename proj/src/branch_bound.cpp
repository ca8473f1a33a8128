#include "gridramp/branch_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <memory>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <thread>

#include "gridramp/simplex.hpp"

namespace gridramp {

namespace {

// One bound fixing on the path from the root; nodes share ancestors.
struct FixStep {
  std::shared_ptr<const FixStep> parent;
  int var = -1;
  double value = 0.0;
};

struct NodeTask {
  std::shared_ptr<const FixStep> fixings; // null at the root
  std::shared_ptr<const std::vector<std::uint8_t>> warm_basis;
  double bound = -kInfinity; // inherited lower bound, internal min sense
  long seq = 0;
  int depth = 0;
};

struct NodeOrder {
  bool operator()(const NodeTask& a, const NodeTask& b) const {
    if (a.bound != b.bound) return a.bound > b.bound; // min-heap on bound
    return a.seq > b.seq;                             // then oldest first
  }
};

struct SearchState {
  std::mutex mu;
  std::condition_variable cv;
  std::priority_queue<NodeTask, std::vector<NodeTask>, NodeOrder> open;
  std::vector<double> inflight; // per worker; +inf when idle

  double incumbent_obj = kInfinity; // internal min sense
  std::vector<double> incumbent;
  bool have_incumbent = false;

  long nodes = 0;
  long next_seq = 0;
  std::vector<double> bound_history; // internal min sense
  double final_bound = -kInfinity;

  bool stop = false;
  bool engine_failed = false;
  bool hit_limit = false;
  bool gap_closed = false;
  double root_lp = 0.0;
  bool root_unbounded = false;
};

class Search {
 public:
  Search(const MILPModel& model, const SolveOptions& options)
      : model_(model), options_(options) {
    sign_ = model.objective().sense == ObjSense::maximize ? -1.0 : 1.0;
    shift_ = model.objective().constant;
    for (int j = 0; j < model.num_variables(); ++j) {
      if (model.variable(j).kind == VarKind::binary) binaries_.push_back(j);
    }
    // Branching priority: binaries touching many rows steer the rest of the
    // model, so decide them first; ties fall back to creation order, which
    // runs forward in time for staged models.
    row_count_.assign(static_cast<std::size_t>(model.num_variables()), 0);
    for (const auto& row : model.constraints()) {
      for (const auto& [id, coef] : row.coeffs) {
        if (coef != 0.0) row_count_[static_cast<std::size_t>(id)] += 1;
      }
    }
    state_.inflight.assign(static_cast<std::size_t>(options.workers), kInfinity);
    start_ = std::chrono::steady_clock::now();
    if (options.time_limit_seconds > 0) {
      deadline_ = start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                               std::chrono::duration<double>(options.time_limit_seconds));
      has_deadline_ = true;
    }
  }

  MILPSolution run() {
    {
      std::lock_guard<std::mutex> lk(state_.mu);
      NodeTask root;
      root.seq = state_.next_seq++;
      state_.open.push(std::move(root));
    }
    if (options_.workers == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(options_.workers));
      for (int w = 0; w < options_.workers; ++w) {
        pool.emplace_back([this, w] { worker(w); });
      }
      for (auto& t : pool) t.join();
    }
    return finish();
  }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  // The gap is measured against the model-sense objective value, so the
  // pruning slack has to use that scale too.
  double gap_slack(double incumbent) const {
    return options_.gap_tol * std::max(1.0, std::fabs(sign_ * incumbent + shift_));
  }

  // Smallest bound of any node still unexplored, including nodes being
  // processed right now. Call with the lock held.
  double open_bound_locked() const {
    double b = kInfinity;
    if (!state_.open.empty()) b = state_.open.top().bound;
    for (double v : state_.inflight) b = std::min(b, v);
    return b;
  }

  double global_bound_locked() const {
    double b = open_bound_locked();
    if (state_.have_incumbent) b = std::min(b, state_.incumbent_obj);
    return b;
  }

  void worker(int id) {
    SimplexOptions lp_opts;
    lp_opts.feasibility_tol = options_.feasibility_tol;
    SimplexEngine engine(lp_opts);
    engine.load(model_);

    // Child kept aside by the previous iteration for depth-first plunging.
    bool have_local = false;
    NodeTask local;
    bool engine_in_sync = false; // engine bounds already match local's parent

    for (;;) {
      NodeTask task;
      bool incremental = false;
      {
        std::unique_lock<std::mutex> lk(state_.mu);
        if (have_local && !state_.stop) {
          task = std::move(local);
          have_local = false;
          incremental = engine_in_sync;
          state_.inflight[static_cast<std::size_t>(id)] = task.bound;
        } else {
          have_local = false;
          for (;;) {
            if (state_.stop) return;
            if (!state_.open.empty()) break;
            bool anyone_busy = false;
            for (double v : state_.inflight) {
              if (v < kInfinity) { anyone_busy = true; break; }
            }
            if (!anyone_busy) {
              state_.stop = true;
              state_.cv.notify_all();
              return;
            }
            state_.cv.wait(lk);
          }
          task = state_.open.top();
          state_.open.pop();
          incremental = false;
          state_.inflight[static_cast<std::size_t>(id)] = task.bound;
        }
      }

      process(engine, task, incremental, id, have_local, local, engine_in_sync);
    }
  }

  // Solve the LP at `task`, record the outcome, and either finish the plunge
  // or hand the round-nearest child back to the caller via `local`.
  void process(SimplexEngine& engine, const NodeTask& task, bool incremental, int id,
               bool& have_local, NodeTask& local, bool& engine_in_sync) {
    engine_in_sync = false;

    bool bounds_ok = true;
    if (incremental) {
      // Engine still holds the parent's bounds; apply only the newest fixing.
      bounds_ok = engine.restrict_bounds(task.fixings->var, task.fixings->value,
                                         task.fixings->value);
    } else {
      engine.reset_bounds();
      for (const FixStep* s = task.fixings.get(); s != nullptr; s = s->parent.get()) {
        if (!engine.restrict_bounds(s->var, s->value, s->value)) {
          bounds_ok = false;
          break;
        }
      }
      if (bounds_ok && task.warm_basis) engine.load_basis(*task.warm_basis);
    }

    // Cheap prune: the inherited bound may already be beaten.
    {
      std::lock_guard<std::mutex> lk(state_.mu);
      if (state_.have_incumbent &&
          state_.incumbent_obj - task.bound <= gap_slack(state_.incumbent_obj)) {
        conclude_node(task, id, task.bound, Outcome::pruned, nullptr, nullptr);
        return;
      }
    }

    if (!bounds_ok) {
      std::lock_guard<std::mutex> lk(state_.mu);
      conclude_node(task, id, kInfinity, Outcome::pruned, nullptr, nullptr);
      return;
    }

    SimplexEngine::Result lp =
        (task.fixings || task.warm_basis) ? engine.solve_warm() : engine.solve();

    std::unique_lock<std::mutex> lk(state_.mu);
    if (task.depth == 0) {
      state_.root_lp = lp.objective;
      if (lp.status == LPStatus::unbounded) state_.root_unbounded = true;
    }

    if (lp.status == LPStatus::failure ||
        (lp.status == LPStatus::unbounded && task.depth > 0)) {
      state_.engine_failed = true;
      conclude_node(task, id, task.bound, Outcome::stopped, nullptr, nullptr);
      return;
    }
    if (lp.status == LPStatus::infeasible || lp.status == LPStatus::unbounded) {
      conclude_node(task, id, kInfinity, Outcome::pruned, nullptr, nullptr);
      return;
    }

    double node_bound = std::max(lp.objective, task.bound);
    if (state_.have_incumbent &&
        state_.incumbent_obj - node_bound <= gap_slack(state_.incumbent_obj)) {
      conclude_node(task, id, node_bound, Outcome::pruned, nullptr, nullptr);
      return;
    }

    // Among fractional binaries, branch on the one touching the most rows;
    // ties go to the lowest variable id (earliest in creation order).
    int branch_var = -1;
    double branch_value = 0.0;
    int best_rows = -1;
    for (int b : binaries_) {
      double x = engine.value(b);
      double frac = std::fabs(x - std::round(x));
      if (frac <= options_.integrality_tol) continue;
      const int rows = row_count_[static_cast<std::size_t>(b)];
      if (rows > best_rows) {
        best_rows = rows;
        branch_var = b;
        branch_value = x;
      }
    }

    if (branch_var < 0) {
      // Integer feasible. Snap binaries before storing the incumbent.
      if (!state_.have_incumbent || lp.objective < state_.incumbent_obj) {
        std::vector<double> values;
        engine.extract_values(values);
        for (int b : binaries_) values[static_cast<std::size_t>(b)] =
            std::round(values[static_cast<std::size_t>(b)]);
        state_.incumbent = std::move(values);
        state_.incumbent_obj = lp.objective;
        state_.have_incumbent = true;
      }
      conclude_node(task, id, node_bound, Outcome::pruned, nullptr, nullptr);
      return;
    }

    lk.unlock();
    auto basis = std::make_shared<const std::vector<std::uint8_t>>(engine.save_basis());

    auto make_child = [&](double fix_to) {
      NodeTask child;
      auto step = std::make_shared<FixStep>();
      step->parent = task.fixings;
      step->var = branch_var;
      step->value = fix_to;
      child.fixings = std::move(step);
      child.warm_basis = basis;
      child.bound = node_bound;
      child.depth = task.depth + 1;
      return child;
    };
    double near = branch_value >= 0.5 ? 1.0 : 0.0;
    NodeTask plunge = make_child(near);
    NodeTask other = make_child(1.0 - near);

    lk.lock();
    conclude_node(task, id, node_bound, Outcome::branched, &plunge, &other);
    if (!state_.stop) {
      local = std::move(plunge);
      have_local = true;
      engine_in_sync = true;
      state_.inflight[static_cast<std::size_t>(id)] = local.bound;
    }
  }

  enum class Outcome { pruned, branched, stopped };

  // Book-keeping shared by every node exit path. Caller holds the lock.
  void conclude_node(const NodeTask& task, int id, double bound, Outcome outcome,
                     NodeTask* plunge, NodeTask* other) {
    (void)task;
    (void)bound;
    state_.nodes += 1;
    state_.inflight[static_cast<std::size_t>(id)] = kInfinity;

    if (outcome == Outcome::branched && !state_.stop) {
      other->seq = state_.next_seq++;
      plunge->seq = state_.next_seq++;
      state_.open.push(std::move(*other));
      state_.cv.notify_one();
    }

    state_.bound_history.push_back(global_bound_locked());

    bool limit = false;
    if (options_.node_limit > 0 && state_.nodes >= options_.node_limit) limit = true;
    if (has_deadline_ && std::chrono::steady_clock::now() >= deadline_) limit = true;
    if (limit) state_.hit_limit = true;

    if (state_.have_incumbent) {
      double bound_now = global_bound_locked();
      if (state_.incumbent_obj - bound_now <= gap_slack(state_.incumbent_obj)) {
        state_.gap_closed = true;
      }
    }

    if (outcome == Outcome::stopped || limit || state_.gap_closed) {
      state_.stop = true;
      state_.final_bound = global_bound_locked();
      state_.cv.notify_all();
    } else {
      state_.cv.notify_all();
    }
  }

  MILPSolution finish() {
    std::lock_guard<std::mutex> lk(state_.mu);
    MILPSolution out;
    out.node_count = state_.nodes;
    out.wall_time_seconds = elapsed();

    const bool exhausted = !state_.engine_failed && !state_.hit_limit &&
                           state_.open.empty() && !state_.gap_closed;
    double bound = state_.stop && state_.final_bound > -kInfinity
                       ? state_.final_bound
                       : global_bound_locked();

    if (state_.root_unbounded) {
      out.status = MILPStatus::unbounded;
      bound = -kInfinity;
    } else if (state_.have_incumbent) {
      if (exhausted || state_.gap_closed) {
        out.status = MILPStatus::optimal;
        if (exhausted) bound = state_.incumbent_obj;
      } else {
        out.status = MILPStatus::feasible;
      }
      out.values = state_.incumbent;
      out.objective = state_.incumbent_obj;
    } else if (exhausted) {
      out.status = MILPStatus::infeasible;
      bound = kInfinity;
    } else {
      out.status = MILPStatus::limit_reached;
    }
    out.best_bound = bound;
    out.bound_history = state_.bound_history;
    out.root_lp_objective = state_.root_lp;

    // Internal results are minimization; convert back to the model's sense.
    auto convert = [&](double v) {
      if (!std::isfinite(v)) return sign_ < 0 ? -v : v;
      return sign_ * v + shift_;
    };
    out.objective = convert(out.objective);
    out.best_bound = convert(out.best_bound);
    out.root_lp_objective = convert(out.root_lp_objective);
    for (double& v : out.bound_history) v = convert(v);
    if (out.has_incumbent()) {
      out.gap = std::fabs(out.objective - out.best_bound) /
                std::max(1.0, std::fabs(out.objective));
    } else {
      out.objective = std::numeric_limits<double>::quiet_NaN();
      out.gap = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
  }

  const MILPModel& model_;
  SolveOptions options_;
  double sign_ = 1.0;
  double shift_ = 0.0;
  std::vector<int> binaries_;
  std::vector<int> row_count_;
  SearchState state_;
  std::chrono::steady_clock::time_point start_;
  std::chrono::steady_clock::time_point deadline_;
  bool has_deadline_ = false;
};

class BuiltinBackend final : public MilpBackend {
 public:
  std::string name() const override { return "bnb"; }
  MILPSolution solve(const MILPModel& model, const SolveOptions& options) const override {
    return solve_milp(model, options);
  }
};

} // namespace

MILPSolution solve_milp(const MILPModel& model, const SolveOptions& options) {
  if (options.gap_tol <= 0 || options.integrality_tol <= 0 || options.feasibility_tol <= 0) {
    throw std::invalid_argument("solve options: tolerances must be positive");
  }
  if (options.workers < 1) {
    throw std::invalid_argument("solve options: workers must be at least 1");
  }
  Search search(model, options);
  return search.run();
}

const MilpBackend& builtin_backend() {
  static const BuiltinBackend backend;
  return backend;
}

const MilpBackend* find_backend(const std::string& name) {
  if (name == "bnb" || name.empty()) return &builtin_backend();
  return nullptr;
}

std::vector<std::string> backend_names() { return {"bnb"}; }

} // namespace gridramp
