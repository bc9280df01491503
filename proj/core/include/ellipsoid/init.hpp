#ifndef ELLIPSOID_INIT_HPP
#define ELLIPSOID_INIT_HPP

#include "ellipsoid/solver.hpp"

namespace ellipsoid {

enum class InitScheme { bigm, fv, twophase };
const char* to_string(InitScheme s);
InitScheme init_scheme_from_string(const std::string& s);

// Augments A^T y <= u with the box -Me <= y <= Me. Initial weights sit on
// the 2n bound rows only; lower bounds come from routing each column through
// the opposing bound rows, so l_j = -M ||a_j||_1 on original rows and -M on
// bound rows.
WorkingSystem big_m_init(const Problem& p, double big_m);

// Homogenizes with an extra variable eta: A^T y - u eta <= 0, -eta <= 0,
// -e <= y <= e, eta <= 1. The homogeneous system is always feasible at the
// origin, so runs treat "-eta <= 0" as violated rather than stopping there.
WorkingSystem freund_vera_init(const Problem& p);

// Maps an augmented-run outcome back to the original system; certificates
// are re-verified against the original data before being reported.
Outcome extract_big_m(const Problem& orig, const WorkingSystem& sys, Outcome aug,
                      const SolverConfig& cfg);
Outcome extract_fv(const Problem& orig, const WorkingSystem& sys, Outcome aug,
                   const SolverConfig& cfg);

// Phase 1 solves A^T y <= 0 over the unit box with the SEA; a strict
// interior point scales onto the original system, a weak certificate either
// settles the original outright or seeds a warm-started phase 2.
Outcome two_phase(const Problem& p, const SolverConfig& cfg);

// Runs the chosen initialization and algorithm end to end on the original
// system.
Outcome solve(const Problem& p, InitScheme scheme, const SolverConfig& cfg, double big_m = 1e4);

}  // namespace ellipsoid

#endif
