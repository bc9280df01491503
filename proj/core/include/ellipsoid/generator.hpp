#ifndef ELLIPSOID_GENERATOR_HPP
#define ELLIPSOID_GENERATOR_HPP

#include <cstdint>

#include "ellipsoid/problem.hpp"

namespace ellipsoid {

struct GenSpec {
    int n = 0;
    int m = 0;
    bool feasible = true;
    std::uint64_t seed = 0;
};

struct GeneratedInstance {
    Problem prob;
    std::vector<double> y0;      // planted point (feasible class)
    std::vector<double> x_cert;  // planted one-sided certificate (infeasible class)
};

// Gaussian A (n x m, column by column), y0 = 100 * Gaussian, u = A^T y0 + e,
// so the residuals at y0 are exactly -e.
GeneratedInstance generate_feasible(const GenSpec& spec);

// Gaussian A projected so A x = 0 for a uniform x in [0,1]^m, then
// u = A^T y0 + Gaussian noise, negated if u^T x > 0. The planted x is a
// one-sided certificate. Retries the noise when u^T x lands at zero
// (RetryExhausted after ten tries).
GeneratedInstance generate_infeasible(const GenSpec& spec);

GeneratedInstance generate(const GenSpec& spec);

}  // namespace ellipsoid

#endif
