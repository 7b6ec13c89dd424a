#pragma once

#include <string>

#include "sysrisk/milp_model.hpp"

namespace sysrisk {

/// Free-format MPS. Rows are named r_a1_<k> ... r_a4_<k> and columns y_<k>, d_<k>
/// (1-based); binaries sit between INTORG/INTEND markers and every column gets an
/// explicit bound. Numbers carry 17 significant digits, so parse_mps restores the
/// problem bit for bit. Maximisation is written as an OBJSENSE MAX section.
std::string export_mps(const MilpProblem& problem, const std::string& name = "SYSRISK");

/// Reads documents produced by export_mps. Throws ParseError.
MilpProblem parse_mps(const std::string& text);

}  // namespace sysrisk
