#include "ellipsoid/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ellipsoid/errors.hpp"

namespace ellipsoid {

namespace {

double max_residual(const Problem& p, std::span<const double> y) {
    double worst = -1e300;
    for (int j = 0; j < p.m; ++j) worst = std::max(worst, p.col_dot(j, y) - p.u[j]);
    return worst;
}

}  // namespace

ConditionInfo tau_grid_oracle(const Problem& p) {
    if (p.n > 3) throw Unsupported("grid oracle limited to n <= 3");
    const int n = p.n;

    // search box: generous multiple of the bound scale over the column norms
    double radius = 1.0;
    for (int j = 0; j < p.m; ++j)
        radius = std::max(radius, std::fabs(p.u[j]) / std::max(p.col_norm2(j), 1e-12));
    radius = 4.0 * radius + 4.0;

    std::vector<double> best(n, 0.0);
    double best_val = max_residual(p, best);
    std::vector<double> center(n, 0.0);
    double step = radius / 10.0;
    const int half = 10;

    for (int level = 0; level < 24; ++level) {
        std::vector<int> idx(n, -half);
        std::vector<double> y(n);
        while (true) {
            for (int i = 0; i < n; ++i) y[i] = center[i] + step * idx[i];
            const double val = max_residual(p, y);
            if (val < best_val) {
                best_val = val;
                best = y;
            }
            int k = 0;
            while (k < n && ++idx[k] > half) idx[k++] = -half;
            if (k == n) break;
        }
        center = best;
        step *= 0.35;
        if (step < 1e-7) break;
    }

    // coordinate polish
    double h = 1e-3;
    for (int round = 0; round < 40; ++round) {
        bool moved = false;
        for (int i = 0; i < n; ++i) {
            for (double dir : {+1.0, -1.0}) {
                std::vector<double> y = best;
                y[i] += dir * h;
                const double val = max_residual(p, y);
                if (val < best_val) {
                    best_val = val;
                    best = y;
                    moved = true;
                }
            }
        }
        if (!moved) h *= 0.5;
        if (h < 1e-9) break;
    }

    ConditionInfo info;
    info.z = best_val;
    info.tau = std::fabs(best_val);
    info.source = ConditionInfo::grid;
    return info;
}

double phi(const EllipsoidState& st, double tau) {
    const int m = st.m();
    if (!(st.f() > 0.0)) throw NonPositiveF("phi requires f > 0");
    const double floor = m / (m + 1.0) * tau;
    double acc = 1.0;
    for (int i = 0; i < m; ++i) {
        const double di = st.d()[i];
        if (!(di > 0.0)) throw PhiUndefined("phi requires strictly positive weights");
        acc *= std::max(std::sqrt(st.f() / di), floor);
    }
    return acc;
}

double psi(const EllipsoidState& st, double tau) {
    const int m = st.m();
    if (!(st.f() > 0.0)) throw NonPositiveF("psi requires f > 0");
    const double floor = m / (m + 1.0) * tau;
    double acc = 1.0;
    for (int i = 0; i < m; ++i) acc *= std::max(st.gamma(i), floor);
    return acc;
}

double phi_hat(const EllipsoidState& st) {
    const int m = st.m();
    if (!(st.f() > 0.0)) throw NonPositiveF("phi_hat requires f > 0");
    double acc = 1.0;
    for (int i = 0; i < m; ++i) {
        const double di = st.d()[i];
        if (!(di > 0.0)) throw PhiUndefined("phi_hat requires strictly positive weights");
        acc *= std::sqrt(st.f() / di);
    }
    return acc;
}

double psi_hat(const EllipsoidState& st) {
    const int m = st.m();
    if (!(st.f() > 0.0)) throw NonPositiveF("psi_hat requires f > 0");
    double acc = 1.0;
    for (int i = 0; i < m; ++i) acc *= st.gamma(i);
    return acc;
}

}  // namespace ellipsoid
