// Command-line front end: validate instance files, compute exchange-ramp
// capability (single run or line-capacity sweep), build ramp-constrained
// cost-optimal schedules, and sweep the utility ramp target.
//
// Exit codes: 0 success, 1 model infeasible, 2 invalid input or flags,
// 3 solver failure or limits.
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gridramp/analysis.hpp"
#include "gridramp/io.hpp"
#include "gridramp/model.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kBadInput = 2;
constexpr int kSolverLimit = 3;

struct CommonFlags {
  std::string instance_path;
  int workers = 1;
  std::string backend;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("instance", flags.instance_path, "instance file (JSON)")->required();
  cmd->add_option("--workers", flags.workers, "threads for independent solves")
      ->check(CLI::PositiveNumber);
  flags.backend = []() {
    const char* env = std::getenv("GRIDRAMP_BACKEND");
    return env != nullptr ? std::string(env) : std::string("bnb");
  }();
  cmd->add_option("--backend", flags.backend,
                  "solver backend (default from GRIDRAMP_BACKEND, else bnb)");
}

// Shared setup: load + validate the instance and resolve the backend.
// Returns nonzero exit code on failure.
int prepare(const CommonFlags& flags, gridramp::MicrogridInstance& inst,
            gridramp::AnalysisOptions& options) {
  inst = gridramp::load_instance(flags.instance_path);
  const auto report = gridramp::validate_instance(inst);
  if (!report.ok()) {
    for (const auto& v : report.violations) {
      std::fprintf(stderr, "error: %s: %s\n", v.path.c_str(), v.message.c_str());
    }
    return kBadInput;
  }
  const gridramp::MilpBackend* backend = gridramp::find_backend(flags.backend);
  if (backend == nullptr) {
    std::fprintf(stderr, "error: unknown backend \"%s\"\n", flags.backend.c_str());
    return kBadInput;
  }
  options.backend = backend;
  options.workers = flags.workers;
  return kOk;
}

int exit_for(gridramp::MILPStatus status) {
  switch (status) {
    case gridramp::MILPStatus::optimal: return kOk;
    case gridramp::MILPStatus::infeasible:
    case gridramp::MILPStatus::unbounded: return kInfeasible;
    case gridramp::MILPStatus::feasible:
    case gridramp::MILPStatus::limit_reached: break;
  }
  return kSolverLimit;
}

std::vector<double> parse_sweep(const std::string& text) {
  double lo = 0, hi = 0, step = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &tail) != 3 || step <= 0 ||
      hi < lo) {
    throw std::invalid_argument("--sweep expects lo:hi:step with step > 0 and hi >= lo");
  }
  std::vector<double> xs;
  for (double x = lo; x <= hi + 1e-9; x += step) xs.push_back(x);
  return xs;
}

int run_validate(const std::string& path) {
  const gridramp::MicrogridInstance inst = gridramp::load_instance(path);
  const auto report = gridramp::validate_instance(inst);
  for (const auto& w : report.warnings) {
    std::printf("warning: %s: %s\n", w.path.c_str(), w.message.c_str());
  }
  if (!report.ok()) {
    for (const auto& v : report.violations) {
      std::printf("violation: %s: %s\n", v.path.c_str(), v.message.c_str());
    }
    return kBadInput;
  }
  std::printf("ok\n");
  return kOk;
}

int run_capability(const CommonFlags& flags, std::optional<double> line_cap,
                   const std::string& sweep, const std::string& out_path) {
  gridramp::MicrogridInstance inst;
  gridramp::AnalysisOptions options;
  if (int rc = prepare(flags, inst, options); rc != kOk) return rc;

  if (line_cap) {
    if (*line_cap < 0) {
      std::fprintf(stderr, "error: --line-cap must be nonnegative\n");
      return kBadInput;
    }
    inst.grid_link.transfer_limit = *line_cap;
  }

  if (!sweep.empty()) {
    const std::vector<double> capacities = parse_sweep(sweep);
    const gridramp::SweepCurve curve =
        gridramp::capability_vs_line_capacity(inst, capacities, options);
    const std::string csv = gridramp::capacity_sweep_csv(curve);
    if (out_path.empty()) {
      std::fputs(csv.c_str(), stdout);
    } else {
      gridramp::write_file(out_path, csv);
    }
    bool any_ok = false, any_infeasible = false;
    for (const auto& p : curve.points) {
      if (p.status == gridramp::MILPStatus::optimal) any_ok = true;
      if (p.status == gridramp::MILPStatus::infeasible) any_infeasible = true;
    }
    if (any_ok) return kOk;
    return any_infeasible ? kInfeasible : kSolverLimit;
  }

  const gridramp::CapabilityResult cap = gridramp::ramping_capability(inst, options);
  if (cap.status == gridramp::MILPStatus::infeasible) {
    std::fprintf(stderr, "error: the power balance cannot be met at any exchange level\n");
    return kInfeasible;
  }
  if (cap.status != gridramp::MILPStatus::optimal) {
    std::fprintf(stderr, "error: solver limits reached before all transitions were proven\n");
    return kSolverLimit;
  }
  if (!out_path.empty()) gridramp::write_file(out_path, gridramp::capability_csv(cap));
  std::printf("capability R = %.6f\n", cap.capability);
  std::printf("binding transition = %d\n", cap.argmin_period);
  return kOk;
}

struct ScheduleFlags {
  std::string feeder_path;
  std::optional<double> delta;
  std::string ramp_cap = "auto";
  std::string out_path;
  std::string profile_path;
  std::string lp_path;
};

int resolve_capability(const gridramp::MicrogridInstance& inst,
                       const gridramp::AnalysisOptions& options, const std::string& text,
                       double& r_out) {
  if (text == "auto") {
    const gridramp::CapabilityResult cap = gridramp::ramping_capability(inst, options);
    if (cap.status != gridramp::MILPStatus::optimal) {
      std::fprintf(stderr, "error: ramping capability could not be established\n");
      return cap.status == gridramp::MILPStatus::infeasible ? kInfeasible : kSolverLimit;
    }
    r_out = cap.capability;
    std::printf("capability R = %.6f\n", r_out);
    return kOk;
  }
  try {
    std::size_t used = 0;
    r_out = std::stod(text, &used);
    if (used != text.size() || r_out < 0) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    std::fprintf(stderr, "error: --ramp-cap expects a nonnegative number or \"auto\"\n");
    return kBadInput;
  }
  return kOk;
}

int run_schedule(const CommonFlags& flags, const ScheduleFlags& sf) {
  gridramp::MicrogridInstance inst;
  gridramp::AnalysisOptions options;
  if (int rc = prepare(flags, inst, options); rc != kOk) return rc;
  options.solver.workers = flags.workers;
  options.lp_dump_path = sf.lp_path;

  gridramp::FeederContext feeder = gridramp::load_feeder(sf.feeder_path);
  if (sf.delta) {
    if (*sf.delta < 0) {
      std::fprintf(stderr, "error: --delta must be nonnegative\n");
      return kBadInput;
    }
    feeder.ramp_target = {*sf.delta};
  } else if (feeder.ramp_target.empty()) {
    std::fprintf(stderr, "error: the feeder file has no ramp_target; pass --delta\n");
    return kBadInput;
  }

  double r = 0.0;
  if (int rc = resolve_capability(inst, options, sf.ramp_cap, r); rc != kOk) return rc;

  const gridramp::ScheduleOutcome outcome = gridramp::optimal_schedule(inst, feeder, r, options);
  if (!outcome.ok()) {
    std::fprintf(stderr, "error: %s\n", outcome.message.c_str());
    return exit_for(outcome.status);
  }

  if (!sf.out_path.empty()) {
    gridramp::write_file(sf.out_path, gridramp::schedule_csv(outcome.schedule));
  }
  if (!sf.profile_path.empty()) {
    gridramp::UtilityProfile prof;
    prof.net = outcome.utility_net;
    prof.ramp = outcome.utility_ramp;
    gridramp::write_file(sf.profile_path, gridramp::utility_profile_csv(prof));
  }
  std::printf("cost = %.6f\n", outcome.cost);
  std::printf("max utility ramp = %.6f\n", outcome.max_abs_utility_ramp);
  if (!outcome.ramp_certified) {
    std::fprintf(stderr, "error: solved schedule failed the utility ramp certification\n");
    return kSolverLimit;
  }
  return exit_for(outcome.status);
}

int run_sweep_ramp(const CommonFlags& flags, const std::string& feeder_path,
                   const std::vector<double>& deltas, const std::string& ramp_cap,
                   const std::string& out_path) {
  gridramp::MicrogridInstance inst;
  gridramp::AnalysisOptions options;
  if (int rc = prepare(flags, inst, options); rc != kOk) return rc;

  const gridramp::FeederContext feeder = gridramp::load_feeder(feeder_path);
  double r = 0.0;
  if (int rc = resolve_capability(inst, options, ramp_cap, r); rc != kOk) return rc;

  const gridramp::SweepCurve curve =
      gridramp::cost_vs_ramp_limit(inst, feeder, r, deltas, options);
  const std::string csv = gridramp::ramp_sweep_csv(curve);
  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    gridramp::write_file(out_path, csv);
  }

  bool any_ok = false, any_infeasible = false;
  for (const auto& p : curve.points) {
    if (p.status == gridramp::MILPStatus::optimal ||
        p.status == gridramp::MILPStatus::feasible) {
      any_ok = true;
    }
    if (p.status == gridramp::MILPStatus::infeasible) any_infeasible = true;
  }
  if (any_ok) return kOk;
  return any_infeasible ? kInfeasible : kSolverLimit;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"microgrid exchange-ramp capability and scheduling toolkit"};
  app.require_subcommand(1);

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "check an instance file");
  validate->add_option("instance", validate_path, "instance file (JSON)")->required();

  CommonFlags cap_flags;
  std::optional<double> line_cap;
  std::string sweep_range;
  std::string cap_out;
  CLI::App* capability =
      app.add_subcommand("capability", "guaranteed exchange swing per transition");
  add_common(capability, cap_flags);
  capability->add_option("--line-cap", line_cap, "override the interconnection limit (MW)");
  capability->add_option("--sweep", sweep_range, "sweep line capacity over lo:hi:step");
  capability->add_option("-o,--out", cap_out, "write the result table here");

  CommonFlags sched_flags;
  ScheduleFlags sf;
  CLI::App* schedule = app.add_subcommand("schedule", "ramp-constrained cost-optimal dispatch");
  add_common(schedule, sched_flags);
  schedule->add_option("--feeder", sf.feeder_path, "feeder context file (JSON)")->required();
  schedule->add_option("--delta", sf.delta, "utility ramp target (MW per transition)");
  schedule->add_option("--ramp-cap", sf.ramp_cap, "capability R in MW, or \"auto\"");
  schedule->add_option("-o,--out", sf.out_path, "write the schedule table here");
  schedule->add_option("--profile-out", sf.profile_path, "write the utility profile here");
  schedule->add_option("--dump-lp", sf.lp_path, "dump the model in LP format before solving");

  CommonFlags ramp_flags;
  std::string ramp_feeder;
  std::vector<double> deltas;
  std::string ramp_cap = "auto";
  std::string ramp_out;
  CLI::App* sweep_ramp = app.add_subcommand("sweep-ramp", "operating cost across ramp targets");
  add_common(sweep_ramp, ramp_flags);
  sweep_ramp->add_option("--feeder", ramp_feeder, "feeder context file (JSON)")->required();
  sweep_ramp->add_option("--deltas", deltas, "ramp targets, comma separated")
      ->required()
      ->delimiter(',');
  sweep_ramp->add_option("--ramp-cap", ramp_cap, "capability R in MW, or \"auto\"");
  sweep_ramp->add_option("-o,--out", ramp_out, "write the curve table here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(validate_path);
    if (capability->parsed()) return run_capability(cap_flags, line_cap, sweep_range, cap_out);
    if (schedule->parsed()) return run_schedule(sched_flags, sf);
    if (sweep_ramp->parsed()) {
      return run_sweep_ramp(ramp_flags, ramp_feeder, deltas, ramp_cap, ramp_out);
    }
  } catch (const gridramp::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  }
  return kBadInput;
}
