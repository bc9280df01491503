#include "ellipsoid/generator.hpp"

#include <cmath>

#include "ellipsoid/errors.hpp"
#include "ellipsoid/rng.hpp"

namespace ellipsoid {

namespace {

void fill_gaussian_matrix(Rng& rng, Problem& p) {
    // column-major fill order, part of the format contract
    for (int j = 0; j < p.m; ++j)
        for (int i = 0; i < p.n; ++i) p.a[static_cast<std::size_t>(j) * p.n + i] = rng.gaussian();
}

std::vector<double> planted_point(Rng& rng, int n) {
    std::vector<double> y0(n);
    for (double& v : y0) v = 100.0 * rng.gaussian();
    return y0;
}

}  // namespace

GeneratedInstance generate_feasible(const GenSpec& spec) {
    if (spec.m <= spec.n || spec.n < 1) throw InvalidInput("generator requires m > n >= 1");
    Rng rng(Rng::mix(spec.seed, static_cast<std::uint64_t>(spec.n),
                     static_cast<std::uint64_t>(spec.m), 1));
    GeneratedInstance inst;
    inst.prob.n = spec.n;
    inst.prob.m = spec.m;
    inst.prob.a.assign(static_cast<std::size_t>(spec.n) * spec.m, 0.0);
    fill_gaussian_matrix(rng, inst.prob);
    inst.y0 = planted_point(rng, spec.n);
    inst.prob.u.resize(spec.m);
    for (int j = 0; j < spec.m; ++j) inst.prob.u[j] = inst.prob.col_dot(j, inst.y0) + 1.0;
    return inst;
}

GeneratedInstance generate_infeasible(const GenSpec& spec) {
    if (spec.m <= spec.n || spec.n < 1) throw InvalidInput("generator requires m > n >= 1");
    Rng rng(Rng::mix(spec.seed, static_cast<std::uint64_t>(spec.n),
                     static_cast<std::uint64_t>(spec.m), 2));
    GeneratedInstance inst;
    Problem& p = inst.prob;
    p.n = spec.n;
    p.m = spec.m;
    p.a.assign(static_cast<std::size_t>(spec.n) * spec.m, 0.0);
    fill_gaussian_matrix(rng, p);
    std::vector<double> y0 = planted_point(rng, spec.n);

    std::vector<double> x(spec.m);
    double xsum = 0.0;
    for (double& v : x) {
        v = rng.uniform();
        xsum += v;
    }
    // A <- A - (1 / e^T x) (A x) e^T, so that A x = 0
    std::vector<double> ax(spec.n, 0.0);
    for (int j = 0; j < spec.m; ++j) {
        const double* cj = p.a.data() + static_cast<std::size_t>(j) * spec.n;
        for (int i = 0; i < spec.n; ++i) ax[i] += cj[i] * x[j];
    }
    for (double& v : ax) v /= xsum;
    for (int j = 0; j < spec.m; ++j) {
        double* cj = p.a.data() + static_cast<std::size_t>(j) * spec.n;
        for (int i = 0; i < spec.n; ++i) cj[i] -= ax[i];
    }

    p.u.resize(spec.m);
    for (int attempt = 0; attempt < 10; ++attempt) {
        double ux = 0.0;
        for (int j = 0; j < spec.m; ++j) {
            p.u[j] = p.col_dot(j, y0) + rng.gaussian();
            ux += p.u[j] * x[j];
        }
        if (ux > 0.0)
            for (double& v : p.u) v = -v;
        else if (ux == 0.0)
            continue;
        inst.x_cert = std::move(x);
        return inst;
    }
    throw RetryExhausted("u^T x kept landing at zero");
}

GeneratedInstance generate(const GenSpec& spec) {
    return spec.feasible ? generate_feasible(spec) : generate_infeasible(spec);
}

}  // namespace ellipsoid
