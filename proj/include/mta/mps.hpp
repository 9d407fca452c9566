#pragma once

#include <string>

#include "mta/program.hpp"

namespace mta {

// Free-format MPS with INTORG/INTEND markers and explicit bounds. Every
// variable gets a COST entry so column order survives a round trip.
std::string to_mps(const MathProgram& mp);
void export_mps(const MathProgram& mp, const std::string& path);

MathProgram parse_mps(const std::string& text);
MathProgram parse_mps_file(const std::string& path);

}  // namespace mta
