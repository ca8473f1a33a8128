// Text dump of a MILPModel in the common LP file format, for inspection
// with external tools. Writer only; there is no reader.
#ifndef GRIDRAMP_LP_FORMAT_HPP
#define GRIDRAMP_LP_FORMAT_HPP

#include <string>

#include "gridramp/milp.hpp"

namespace gridramp {

std::string write_lp_format(const MILPModel& model);
void write_lp_file(const MILPModel& model, const std::string& path);

} // namespace gridramp

#endif // GRIDRAMP_LP_FORMAT_HPP
