#pragma once

#include <iosfwd>
#include <string>

#include "sbridge/schrodinger.hpp"

namespace sbridge {

// Metadata and scalar results of a solve as one JSON object.
std::string solution_json(const SchrodingerSolution& sol);

// x[,y],mu,nu,phi,psi with empty fields where a potential is undefined.
void write_potentials_csv(std::ostream& os, const SchrodingerSolution& sol);

// i,j,weight for plan entries above `threshold`.
void write_plan_csv(std::ostream& os, const SchrodingerSolution& sol, double threshold = 0);

}  // namespace sbridge
