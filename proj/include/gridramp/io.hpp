// File formats: JSON documents for instances and feeder contexts
// (versioned, unknown keys rejected, lossless round-trip) and fixed-layout
// CSV tables for schedules, profiles, and sweep curves.
#ifndef GRIDRAMP_IO_HPP
#define GRIDRAMP_IO_HPP

#include <stdexcept>
#include <string>

#include "gridramp/analysis.hpp"
#include "gridramp/model.hpp"
#include "gridramp/schedule.hpp"

namespace gridramp {

// Raised for malformed documents; `where` is the dotted path of the
// offending element.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

MicrogridInstance parse_instance(const std::string& text);
MicrogridInstance load_instance(const std::string& path);
std::string serialize_instance(const MicrogridInstance& instance);

FeederContext parse_feeder(const std::string& text);
FeederContext load_feeder(const std::string& path);
std::string serialize_feeder(const FeederContext& feeder);

// CSV tables. Layouts are fixed; all numbers carry six decimals and a
// header row is always present.
std::string schedule_csv(const Schedule& schedule);
std::string utility_profile_csv(const UtilityProfile& profile);
std::string capability_csv(const CapabilityResult& result);
std::string capacity_sweep_csv(const SweepCurve& curve);
std::string ramp_sweep_csv(const SweepCurve& curve);

const char* status_name(MILPStatus status);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace gridramp

#endif // GRIDRAMP_IO_HPP
