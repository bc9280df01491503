#ifndef ELLIPSOID_POTENTIALS_HPP
#define ELLIPSOID_POTENTIALS_HPP

#include "ellipsoid/state.hpp"

namespace ellipsoid {

// tau = |z| with z = min_y max_i (a_i^T y - u_i); positive z means the
// system is empty, negative z means a strictly interior point exists.
// Analysis-only: the solvers never read it.
struct ConditionInfo {
    double z = 0.0;
    double tau = 0.0;
    enum Source { constructed, grid } source = constructed;
};

// Minimizes max_i (a_i^T y - u_i) by a refined lattice search followed by
// coordinate descent. Supported for n <= 3 (Unsupported otherwise);
// accuracy around 1e-4 on well-scaled instances.
ConditionInfo tau_grid_oracle(const Problem& p);

// prod_i max{ (d_i / f)^(-1/2), m/(m+1) tau }; PhiUndefined if any d_i <= 0.
double phi(const EllipsoidState& st, double tau);

// prod_i max{ gamma_i, m/(m+1) tau }; requires f > 0.
double psi(const EllipsoidState& st, double tau);

// The same products without the floors.
double phi_hat(const EllipsoidState& st);
double psi_hat(const EllipsoidState& st);

}  // namespace ellipsoid

#endif
