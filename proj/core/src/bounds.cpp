#include "ellipsoid/bounds.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "ellipsoid/errors.hpp"

namespace ellipsoid {

BoundState::BoundState(int m, std::vector<double> l, std::vector<double> lambda)
    : m_(m), l_(std::move(l)), lambda_(std::move(lambda)) {
    if (l_.size() != static_cast<std::size_t>(m_) ||
        lambda_.size() != static_cast<std::size_t>(m_) * m_)
        throw InvalidInput("bound state dimensions");
}

void BoundState::set_col(int j, std::span<const double> lam, double bound) {
    std::copy(lam.begin(), lam.end(), lambda_.begin() + static_cast<std::size_t>(j) * m_);
    l_[j] = bound;
}

std::vector<double> BoundState::lambda_times(std::span<const double> x) const {
    std::vector<double> out(m_, 0.0);
    for (int j = 0; j < m_; ++j) {
        const double xj = x[j];
        if (xj == 0.0) continue;
        const double* cj = lambda_.data() + static_cast<std::size_t>(j) * m_;
        for (int i = 0; i < m_; ++i) out[i] += cj[i] * xj;
    }
    return out;
}

bool BoundState::verify(const Problem& p, double tol) const {
    const double scale = p.max_abs_entry();
    for (double v : lambda_)
        if (v < -tol) return false;
    for (int j = 0; j < m_; ++j) {
        // A lambda_j + a_j = 0
        std::vector<double> acc(p.a.begin() + static_cast<std::size_t>(j) * p.n,
                                p.a.begin() + static_cast<std::size_t>(j + 1) * p.n);
        const double* cj = lambda_.data() + static_cast<std::size_t>(j) * m_;
        double lam1 = 1.0;
        for (int k = 0; k < m_; ++k) {
            if (cj[k] == 0.0) continue;
            lam1 += std::fabs(cj[k]);
            const double* ak = p.a.data() + static_cast<std::size_t>(k) * p.n;
            for (int i = 0; i < p.n; ++i) acc[i] += cj[k] * ak[i];
        }
        for (double v : acc)
            if (std::fabs(v) > tol * scale * lam1) return false;
        double lu = 0.0;
        for (int k = 0; k < m_; ++k) lu += cj[k] * p.u[k];
        if (std::fabs(l_[j] + lu) > tol * (1.0 + std::fabs(lu))) return false;
    }
    return true;
}

double theta(std::span<const double> l, std::span<const double> u, std::span<const double> lam) {
    double acc = 0.0;
    for (std::size_t i = 0; i < lam.size(); ++i) {
        const double v = lam[i];
        if (v > 0.0)
            acc -= u[i] * v;
        else if (v < 0.0)
            acc += l[i] * (-v);
    }
    return acc;
}

DualVector bound_from_ellipsoid(const EllipsoidState& st, int j) {
    const Problem& p = st.problem();
    const double gsq = st.semiwidth_sq()[j];
    if (!(gsq > 1e-300)) throw DegenerateDirection("semi-width vanished");
    const double gam = std::sqrt(gsq);

    std::vector<double> ba = st.solve_b(p.col(j));
    DualVector dv;
    dv.j = j;
    dv.lam.resize(p.m);
    for (int i = 0; i < p.m; ++i)
        dv.lam[i] = st.d()[i] * (gam * st.tbar()[i] - p.col_dot(i, ba));
    dv.bound = theta(st.l(), p.u, dv.lam);
    return dv;
}

DualVector zero_jth_component(const EllipsoidState& st, const DualVector& dv) {
    const double lj = dv.lam[dv.j];
    if (lj <= -1.0) throw DegenerateDirection("self-multiplier at or below -1");
    DualVector out;
    out.j = dv.j;
    out.lam = dv.lam;
    out.lam[dv.j] = 0.0;
    const double inv = 1.0 / (1.0 + lj);
    for (double& v : out.lam) v *= inv;
    out.bound = theta(st.l(), st.problem().u, out.lam);
    return out;
}

DualVector nonnegativize(const BoundState& bs, std::span<const double> u, const DualVector& dv) {
    std::vector<double> neg(dv.lam.size(), 0.0);
    DualVector out;
    out.j = dv.j;
    out.lam.assign(dv.lam.size(), 0.0);
    bool any_neg = false;
    for (std::size_t i = 0; i < dv.lam.size(); ++i) {
        if (dv.lam[i] > 0.0)
            out.lam[i] = dv.lam[i];
        else if (dv.lam[i] < 0.0) {
            neg[i] = -dv.lam[i];
            any_neg = true;
        }
    }
    if (any_neg) {
        const std::vector<double> shift = bs.lambda_times(neg);
        for (std::size_t i = 0; i < out.lam.size(); ++i) out.lam[i] += shift[i];
    }
    double b = 0.0;
    for (std::size_t i = 0; i < out.lam.size(); ++i) b -= u[i] * out.lam[i];
    out.bound = b;
    return out;
}

DualVector best_lower_bound(const EllipsoidState& st, int j) {
    const Problem& p = st.problem();
    const int m = p.m;
    const double gsq = st.semiwidth_sq()[j];
    if (!(gsq > 1e-300)) throw DegenerateDirection("semi-width vanished");

    std::vector<double> ba = st.solve_b(p.col(j));
    std::vector<double> s(m);
    for (int i = 0; i < m; ++i) s[i] = p.col_dot(i, ba);

    const double dj = st.d()[j];
    const double denom = 1.0 - dj * s[j];
    if (!(denom > 1e-14)) throw DegenerateDirection("d_j gamma_j^2 at one");
    const double a_nu = dj * st.tbar()[j] / denom;
    const double b_nu = -1.0 / denom;

    // lambda(mu) = c0 + mu * c1 with lambda_j == 0 identically
    std::vector<double> c0(m), c1(m);
    for (int i = 0; i < m; ++i) {
        const double dsi = st.d()[i] * s[i];
        c0[i] = b_nu * dsi;
        c1[i] = st.d()[i] * st.tbar()[i] + a_nu * dsi;
    }
    c0[j] += -1.0 - b_nu;
    c1[j] -= a_nu;
    c0[j] = 0.0;
    c1[j] = 0.0;

    double c1_scale = 0.0;
    for (double v : c1) c1_scale = std::max(c1_scale, std::fabs(v));
    const double c1_tiny = 1e-14 * c1_scale;

    const auto make_result = [&](double mu) {
        DualVector dv;
        dv.j = j;
        dv.lam.resize(m);
        for (int i = 0; i < m; ++i) dv.lam[i] = c0[i] + mu * c1[i];
        dv.lam[j] = 0.0;
        dv.bound = theta(st.l(), p.u, dv.lam);
        return dv;
    };

    if (c1_scale == 0.0) return make_result(0.0);

    // breakpoints where a component of lambda changes sign
    std::vector<std::pair<double, int>> bps;
    bps.reserve(m);
    double slope = 0.0;  // d theta / d mu at mu -> -inf
    for (int i = 0; i < m; ++i) {
        if (std::fabs(c1[i]) <= c1_tiny) {
            slope -= st.r()[i] * c1[i];
            continue;
        }
        slope += -st.r()[i] * c1[i] + st.v()[i] * std::fabs(c1[i]);
        bps.emplace_back(-c0[i] / c1[i], i);
    }
    std::sort(bps.begin(), bps.end());

    const double slope_tol = 0.0;
    const double big = 1e6 * (1.0 + std::fabs(bps.empty() ? 0.0 : bps.back().first) +
                              std::fabs(bps.empty() ? 0.0 : bps.front().first));
    if (slope < slope_tol) {
        // concave with negative leading slope: unbounded toward -inf, which
        // can only happen for empty systems; step far out for the evidence
        return make_result((bps.empty() ? 0.0 : bps.front().first) - big);
    }
    for (const auto& [mu, i] : bps) {
        slope -= 2.0 * st.v()[i] * std::fabs(c1[i]);
        if (slope <= slope_tol) return make_result(mu);
    }
    // still climbing past the last breakpoint: unbounded toward +inf
    return make_result(bps.back().first + big);
}

std::optional<Certificate> accept_bound(BoundState& bs, const Problem& p, const DualVector& dv) {
    double lmax = 0.0;
    for (double v : dv.lam) lmax = std::max(lmax, std::fabs(v));
    for (double v : dv.lam)
        if (v < -1e-10 * (1.0 + lmax)) throw InvalidInput("dual vector must be nonnegative");

    if (dv.bound > p.u[dv.j]) {
        Certificate c;
        c.kind = CertKind::one_sided;
        c.x = dv.lam;
        for (double& v : c.x) v = std::max(v, 0.0);
        c.x[dv.j] += 1.0;
        return c;
    }
    if (dv.bound > bs.l(dv.j)) {
        std::vector<double> clean(dv.lam.begin(), dv.lam.end());
        for (double& v : clean) v = std::max(v, 0.0);
        bs.set_col(dv.j, clean, dv.bound);
    }
    return std::nullopt;
}

void accept_bound_capped(BoundState& bs, const Problem& p, const DualVector& dv, double cap) {
    const int j = dv.j;
    if (!(cap < p.u[j]) || dv.bound <= bs.l(j) || cap <= bs.l(j)) return;
    const double target = std::min(cap, dv.bound);
    const double eta = (target - bs.l(j)) / (dv.bound - bs.l(j));
    std::vector<double> blend(bs.col(j).begin(), bs.col(j).end());
    for (int i = 0; i < bs.m(); ++i)
        blend[i] = (1.0 - eta) * blend[i] + eta * std::max(dv.lam[i], 0.0);
    bs.set_col(j, blend, target);
}

Certificate convert_to_one_sided(const Problem& p, const BoundState& bs, const Certificate& c,
                                 double eps) {
    if (c.kind != CertKind::two_sided) throw InvalidInput("expected a two-sided certificate");
    if (!verify_certificate(p, bs.l(), c, eps))
        throw InvalidInput("certificate fails verification");
    return one_sided_combination(bs, c.x);
}

Certificate one_sided_combination(const BoundState& bs, std::span<const double> x) {
    Certificate out;
    out.kind = CertKind::one_sided;
    std::vector<double> neg(x.size(), 0.0);
    out.x.assign(x.size(), 0.0);
    bool any_neg = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0)
            out.x[i] = x[i];
        else if (x[i] < 0.0) {
            neg[i] = -x[i];
            any_neg = true;
        }
    }
    if (any_neg) {
        const std::vector<double> shift = bs.lambda_times(neg);
        for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] += shift[i];
    }
    return out;
}

}  // namespace ellipsoid
