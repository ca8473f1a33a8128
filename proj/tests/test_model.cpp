#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <limits>
#include <random>

#include "gridramp/model.hpp"
#include "testsupport.hpp"

using namespace gridramp;

namespace {

bool mentions(const std::vector<ValidationIssue>& issues, const std::string& needle) {
  return std::any_of(issues.begin(), issues.end(), [&](const ValidationIssue& v) {
    return v.path.find(needle) != std::string::npos;
  });
}

MicrogridInstance valid_instance() {
  MicrogridInstance inst;
  inst.time_grid.periods = 3;
  inst.time_grid.step_hours = 1.0;

  DispatchableUnit g;
  g.id = "g1";
  g.p_min = 1.0;
  g.p_max = 5.0;
  g.marginal_cost = 20.0;
  g.ramp_up = 5.0;
  g.ramp_down = 5.0;
  g.min_up = 1;
  g.min_down = 1;
  g.initial_committed = true;
  g.initial_power = 2.0;
  g.initial_state_duration = 3;
  inst.dispatchable_units.push_back(g);

  StorageUnit s;
  s.id = "b1";
  s.p_dch_max = 2.0;
  s.p_ch_max = 2.0;
  s.cap_min = 0.0;
  s.cap_max = 4.0;
  s.efficiency = 0.9;
  s.initial_energy = 2.0;
  inst.storage_units.push_back(s);

  AdjustableLoad d;
  d.id = "l1";
  d.window_start = 1;
  d.window_end = 3;
  d.min_on = 1;
  d.d_min.assign(3, 0.0);
  d.d_max.assign(3, 2.0);
  d.energy = 3.0;
  inst.adjustable_loads.push_back(d);

  inst.fixed_profiles.fixed_load = {4.0, 5.0, 6.0};
  inst.fixed_profiles.nondispatchable_gen = {1.0, 0.0, 0.0};
  inst.grid_link.transfer_limit = 10.0;
  inst.grid_link.market_price = {30.0, 35.0, 40.0};
  return inst;
}

} // namespace

TEST_CASE("a well-formed instance validates cleanly") {
  const ValidationReport r = validate_instance(valid_instance());
  CHECK(r.ok());
  CHECK(r.warnings.empty());
}

TEST_CASE("the time grid is checked before anything else") {
  MicrogridInstance inst = valid_instance();
  inst.time_grid.periods = 0;
  const ValidationReport r = validate_instance(inst);
  REQUIRE_FALSE(r.ok());
  CHECK(mentions(r.violations, "time_grid.periods"));

  inst = valid_instance();
  inst.time_grid.step_hours = 0.0;
  CHECK(mentions(validate_instance(inst).violations, "time_grid.step_hours"));
}

TEST_CASE("unit bounds and costs") {
  MicrogridInstance inst = valid_instance();
  inst.dispatchable_units[0].p_min = 7.0; // above p_max
  CHECK(mentions(validate_instance(inst).violations, "p_min"));

  inst = valid_instance();
  inst.dispatchable_units[0].marginal_cost = -1.0;
  CHECK(mentions(validate_instance(inst).violations, "costs"));

  inst = valid_instance();
  inst.dispatchable_units[0].min_up = 0;
  CHECK(mentions(validate_instance(inst).violations, "min_up"));
}

TEST_CASE("initial unit state must be consistent") {
  MicrogridInstance inst = valid_instance();
  inst.dispatchable_units[0].initial_power = 0.5; // below p_min while committed
  CHECK(mentions(validate_instance(inst).violations, "initial_power"));

  inst = valid_instance();
  inst.dispatchable_units[0].initial_committed = false;
  inst.dispatchable_units[0].initial_power = 1.0; // nonzero while offline
  CHECK(mentions(validate_instance(inst).violations, "initial_power"));
}

TEST_CASE("a p_min above the ramp rates earns a warning, not a violation") {
  MicrogridInstance inst = valid_instance();
  inst.dispatchable_units[0].ramp_up = 0.5;
  const ValidationReport r = validate_instance(inst);
  CHECK(r.ok());
  CHECK(mentions(r.warnings, "p_min"));
}

TEST_CASE("storage bands, capacity, and efficiency") {
  MicrogridInstance inst = valid_instance();
  inst.storage_units[0].p_dch_min = 3.0; // above p_dch_max
  CHECK(mentions(validate_instance(inst).violations, "p_dch_min"));

  inst = valid_instance();
  inst.storage_units[0].efficiency = 1.2;
  CHECK(mentions(validate_instance(inst).violations, "efficiency"));

  inst = valid_instance();
  inst.storage_units[0].initial_energy = 9.0; // above cap_max
  CHECK(mentions(validate_instance(inst).violations, "initial_energy"));

  inst = valid_instance();
  inst.storage_units[0].min_charge_time = 0;
  CHECK(mentions(validate_instance(inst).violations, "min_charge_time"));
}

TEST_CASE("load windows and energy reachability") {
  MicrogridInstance inst = valid_instance();
  inst.adjustable_loads[0].window_end = 5; // beyond the horizon
  CHECK(mentions(validate_instance(inst).violations, "window_start"));

  inst = valid_instance();
  inst.adjustable_loads[0].energy = 10.0; // above the band total
  CHECK(mentions(validate_instance(inst).violations, "energy"));

  inst = valid_instance();
  inst.adjustable_loads[0].d_min = {1.0, 1.0, 1.0};
  inst.adjustable_loads[0].d_max = {0.5, 2.0, 2.0};
  CHECK(mentions(validate_instance(inst).violations, "d_min"));
}

TEST_CASE("an energy demand at its exact feasibility endpoint is flagged") {
  MicrogridInstance inst = valid_instance();
  inst.adjustable_loads[0].energy = 6.0; // exactly the d_max total
  const ValidationReport r = validate_instance(inst);
  CHECK(r.ok());
  CHECK(mentions(r.warnings, "energy"));
}

TEST_CASE("an unfinished stay obligation cannot precede the window") {
  MicrogridInstance inst = valid_instance();
  inst.adjustable_loads[0].window_start = 2;
  inst.adjustable_loads[0].window_end = 3;
  inst.adjustable_loads[0].energy = 2.0;
  inst.adjustable_loads[0].min_on = 2;
  inst.adjustable_loads[0].initial_operating = true;
  inst.adjustable_loads[0].initial_on_duration = 1;
  CHECK(mentions(validate_instance(inst).violations, "initial_operating"));

  // once the obligation is already met, the same shape is fine
  inst.adjustable_loads[0].initial_on_duration = 2;
  CHECK(validate_instance(inst).ok());
}

TEST_CASE("profiles must match the grid and stay finite") {
  MicrogridInstance inst = valid_instance();
  inst.fixed_profiles.fixed_load.pop_back();
  CHECK(mentions(validate_instance(inst).violations, "fixed_load"));

  inst = valid_instance();
  inst.fixed_profiles.nondispatchable_gen[1] = -0.5;
  CHECK(mentions(validate_instance(inst).violations, "nondispatchable_gen"));

  inst = valid_instance();
  inst.grid_link.market_price = {30.0};
  CHECK(mentions(validate_instance(inst).violations, "market_price"));

  // prices may legitimately be negative
  inst = valid_instance();
  inst.grid_link.market_price = {-5.0, 0.0, 5.0};
  CHECK(validate_instance(inst).ok());
}

TEST_CASE("component ids must be unique across sections") {
  MicrogridInstance inst = valid_instance();
  inst.storage_units[0].id = "g1";
  CHECK(mentions(validate_instance(inst).violations, "storage_units[0].id"));

  inst = valid_instance();
  inst.adjustable_loads[0].id = "";
  CHECK(mentions(validate_instance(inst).violations, "adjustable_loads[0].id"));
}

TEST_CASE("the transfer limit and starting exchange") {
  MicrogridInstance inst = valid_instance();
  inst.grid_link.transfer_limit = -2.0;
  CHECK(mentions(validate_instance(inst).violations, "transfer_limit"));

  inst = valid_instance();
  inst.grid_link.initial_exchange = std::numeric_limits<double>::infinity();
  CHECK(mentions(validate_instance(inst).violations, "initial_exchange"));
}

TEST_CASE("ramp targets broadcast from a single entry") {
  FeederContext feeder;
  feeder.customer_net_load = {1.0, 2.0, 3.0};
  feeder.ramp_target = {2.5};
  CHECK(ramp_target_at(feeder, 1) == 2.5);
  CHECK(ramp_target_at(feeder, 3) == 2.5);
  feeder.ramp_target = {1.0, 2.0, 3.0};
  CHECK(ramp_target_at(feeder, 2) == 2.0);
}

TEST_CASE("random tiny instances always validate") {
  std::mt19937 rng(5);
  for (int k = 0; k < 200; ++k) {
    const MicrogridInstance inst = testsupport::random_tiny_instance(rng);
    CHECK(validate_instance(inst).ok());
    CHECK(inst.time_grid.periods <= 4);
    CHECK(inst.dispatchable_units.size() <= 1);
    CHECK(inst.storage_units.size() <= 1);
    CHECK(inst.adjustable_loads.size() <= 1);
  }
}
