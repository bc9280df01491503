#include "ellipsoid/state.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "ellipsoid/errors.hpp"

namespace ellipsoid {

namespace {
constexpr double kTinyWidth = 1e-300;
}

EllipsoidState::EllipsoidState(const Problem& p, std::vector<double> d, std::vector<double> l)
    : prob_(&p), d_(std::move(d)), l_(std::move(l)) {
    const int m = p.m;
    if (d_.size() != static_cast<std::size_t>(m) || l_.size() != static_cast<std::size_t>(m))
        throw InvalidInput("state vectors must have length m");
    for (double dj : d_)
        if (dj < 0.0) throw NegativeWeight("negative weight at construction");
    r_.resize(m);
    v_.resize(m);
    for (int j = 0; j < m; ++j) {
        r_[j] = 0.5 * (p.u[j] + l_[j]);
        v_[j] = 0.5 * (p.u[j] - l_[j]);
    }
    refactorize();
}

void EllipsoidState::refactorize() {
    const Problem& p = *prob_;
    SymMatrix s(p.n);
    for (int j = 0; j < p.m; ++j)
        if (d_[j] != 0.0) s.add_outer(p.col(j), d_[j]);
    chol_ = CholFactor::factorize(s);
    rebuild_from_factor();
}

void EllipsoidState::rebuild_from_factor() {
    const Problem& p = *prob_;
    // center from A D r
    std::vector<double> adr(p.n, 0.0);
    for (int j = 0; j < p.m; ++j) {
        const double c = d_[j] * r_[j];
        if (c == 0.0) continue;
        const double* cj = p.a.data() + static_cast<std::size_t>(j) * p.n;
        for (int i = 0; i < p.n; ++i) adr[i] += c * cj[i];
    }
    chol_.solve(adr);
    ybar_ = std::move(adr);
    recompute_tbar();

    w_.resize(p.m);
    std::vector<double> z(p.n);
    for (int j = 0; j < p.m; ++j) {
        const auto cj = p.col(j);
        std::copy(cj.begin(), cj.end(), z.begin());
        chol_.solve_lower(z);
        double acc = 0.0;
        for (double zv : z) acc += zv * zv;
        w_[j] = acc;
    }
    f_ = f_value();
    p_ = -chol_.log_det();
}

void EllipsoidState::recompute_tbar() {
    const Problem& p = *prob_;
    tbar_.resize(p.m);
    for (int j = 0; j < p.m; ++j) tbar_[j] = p.col_dot(j, ybar_) - r_[j];
}

double EllipsoidState::f_value() const {
    double acc = 0.0;
    for (int j = 0; j < prob_->m; ++j)
        if (d_[j] != 0.0) acc += d_[j] * (v_[j] * v_[j] - tbar_[j] * tbar_[j]);
    return acc;
}

double EllipsoidState::f_crosscheck() const {
    const Problem& p = *prob_;
    std::vector<double> adr(p.n, 0.0);
    double rdr = 0.0, vdv = 0.0;
    for (int j = 0; j < p.m; ++j) {
        const double dj = d_[j];
        if (dj == 0.0) continue;
        rdr += dj * r_[j] * r_[j];
        vdv += dj * v_[j] * v_[j];
        const double c = dj * r_[j];
        const double* cj = p.a.data() + static_cast<std::size_t>(j) * p.n;
        for (int i = 0; i < p.n; ++i) adr[i] += c * cj[i];
    }
    std::vector<double> b = adr;
    chol_.solve(b);
    double quad = 0.0;
    for (int i = 0; i < p.n; ++i) quad += adr[i] * b[i];
    return quad - rdr + vdv;
}

double EllipsoidState::gamma(int i) const {
    if (!(f_ > 0.0)) throw NonPositiveF("gamma requires f > 0");
    return std::sqrt(f_ * std::max(w_[i], 0.0));
}

double EllipsoidState::g_value() const {
    if (!(f_ > 0.0)) return std::numeric_limits<double>::infinity();
    return n() * std::log(f_) + p_;
}

double EllipsoidState::g_tilde() const { return n() * f_ + p_ - n(); }

void EllipsoidState::scale_to_unit_f() {
    if (!(f_ > 0.0)) throw NonPositiveF("scale_to_unit_f requires f > 0");
    const double c = f_;
    if (c == 1.0) return;
    const double inv = 1.0 / c;
    for (double& dj : d_) dj *= inv;
    // (1/c) A D A^T has factor L / sqrt(c) and inverse c B.
    chol_.scale(1.0 / std::sqrt(c));
    for (double& wi : w_) wi *= c;
    f_ = 1.0;
    p_ = -chol_.log_det();
}

void EllipsoidState::weight_step(int j, double sigma, double coeff) {
    const Problem& p = *prob_;
    const double gsq = w_[j];
    if (!(gsq > kTinyWidth)) throw DegenerateDirection("a_j^T B a_j vanished");
    const double gam = std::sqrt(gsq);
    const double newdj = d_[j] + coeff;
    if (newdj < -1e-12 * (1.0 + d_[j]))
        throw NegativeWeight("weight " + std::to_string(j) + " would become negative");

    std::vector<double> ba(p.col(j).begin(), p.col(j).end());
    chol_.solve(ba);
    std::vector<double> s(p.m);
    for (int i = 0; i < p.m; ++i) s[i] = p.col_dot(i, ba);

    const double alpha = (tbar_[j] - v_[j]) / gam;
    const double beta = (tbar_[j] + v_[j]) / gam;

    chol_.rank_one_modify(p.col(j), coeff);  // may throw DowndateIndefinite

    d_[j] = std::max(newdj, 0.0);
    const double shift = sigma * (alpha + beta) / (2.0 * gam);
    for (int i = 0; i < p.n; ++i) ybar_[i] -= shift * ba[i];
    const double bmah = beta - alpha;
    f_ = 1.0 - alpha * beta * sigma + 0.25 * bmah * bmah * sigma * sigma / (1.0 - sigma);
    for (int i = 0; i < p.m; ++i) w_[i] -= sigma * s[i] * s[i] / gsq;
    w_[j] = (1.0 - sigma) * gsq;
    recompute_tbar();
    p_ = -chol_.log_det();
}

void EllipsoidState::apply_sigma(int j, double sigma) {
    if (!(sigma < 1.0)) throw InvalidInput("sigma must be below one");
    if (sigma == 0.0) return;
    const double gsq = w_[j];
    if (!(gsq > kTinyWidth)) throw DegenerateDirection("a_j^T B a_j vanished");
    const double coeff = sigma / ((1.0 - sigma) * gsq);
    weight_step(j, sigma, coeff);
}

void EllipsoidState::apply_drop(int j) {
    if (d_[j] == 0.0) return;
    const double gsq = w_[j];
    const double djg = d_[j] * gsq;
    if (djg >= 1.0 - 1e-12)
        throw DegenerateDirection("dropping weight " + std::to_string(j) +
                                  " would lose positive definiteness");
    const double sigma0 = -djg / (1.0 - djg);
    weight_step(j, sigma0, -d_[j]);
    d_[j] = 0.0;
}

double EllipsoidState::pareto_center_to_boundary(int j) {
    const double viol = tbar_[j] - v_[j];  // a_j^T ybar - u_j
    if (viol <= 0.0) return 0.0;
    if (!(tbar_[j] > 0.0)) throw DegenerateDirection("tbar_j must be positive");
    const double sigma = viol / tbar_[j];
    apply_sigma(j, sigma);
    return sigma;
}

void EllipsoidState::pareto_raise_bound(int j, double new_lj) {
    const Problem& p = *prob_;
    if (!(new_lj > l_[j] && new_lj < p.u[j]))
        throw InvalidInput("raised bound must lie strictly between l_j and u_j");
    const double mu = (new_lj - l_[j]) / (p.u[j] - new_lj) * d_[j];
    if (mu > 0.0) {
        std::vector<double> ba(p.col(j).begin(), p.col(j).end());
        chol_.solve(ba);
        std::vector<double> s(p.m);
        for (int i = 0; i < p.m; ++i) s[i] = p.col_dot(i, ba);
        chol_.rank_one_modify(p.col(j), mu);
        const double denom = 1.0 + mu * s[j];
        for (int i = 0; i < p.m; ++i) w_[i] -= mu * s[i] * s[i] / denom;
        d_[j] += mu;
        p_ = -chol_.log_det();
    }
    l_[j] = new_lj;
    r_[j] = 0.5 * (p.u[j] + l_[j]);
    v_[j] = 0.5 * (p.u[j] - l_[j]);
    tbar_[j] = p.col_dot(j, ybar_) - r_[j];
    // Both j-terms of f cancel while the center sits on the boundary.
    f_ = f_value();
}

double EllipsoidState::mahalanobis(std::span<const double> y) const {
    std::vector<double> z(y.begin(), y.end());
    for (int i = 0; i < prob_->n; ++i) z[i] -= ybar_[i];
    // (z)^T L L^T (z) = ||L^T z||^2
    double acc = 0.0;
    for (int i = 0; i < prob_->n; ++i) {
        double q = 0.0;
        for (int k = i; k < prob_->n; ++k) q += chol_.entry(k, i) * z[k];
        acc += q * q;
    }
    return acc;
}

std::vector<double> EllipsoidState::certificate_vector() const {
    std::vector<double> x(prob_->m);
    for (int j = 0; j < prob_->m; ++j) x[j] = d_[j] * tbar_[j];
    return x;
}

std::vector<double> EllipsoidState::solve_b(std::span<const double> rhs) const {
    std::vector<double> b(rhs.begin(), rhs.end());
    chol_.solve(b);
    return b;
}

bool EllipsoidState::cache_consistent(double tol) const {
    return std::fabs(f_value() - f_) <= tol * (1.0 + std::fabs(f_));
}

StateDecision certificate_from_state(const EllipsoidState& st, bool center_feasible,
                                     double cert_eps, double f_zero_eps_rel) {
    const Problem& p = st.problem();
    StateDecision out;

    double vdv = 0.0;
    for (int j = 0; j < p.m; ++j) vdv += st.d()[j] * st.v()[j] * st.v()[j];
    const double f_eps = f_zero_eps_rel * (1.0 + std::fabs(vdv));
    const double f = st.f_value();

    Certificate base{st.certificate_vector(), CertKind::two_sided};
    const bool base_ok = verify_certificate(p, st.l(), base, cert_eps);

    if (f > f_eps) {
        // Aggregation still roomy; D tbar can certify anyway.
        if (base_ok) out = {StateDecision::cert, std::move(base), false};
        return out;
    }

    out.collapsed = true;
    if (f >= -f_eps && center_feasible) {
        out.kind = StateDecision::feasible;
        return out;
    }

    if (base_ok) return {StateDecision::cert, std::move(base), true};

    if (f >= -f_eps) {
        // Degenerate ellipsoid with infeasible center: perturb x along
        // e_j - D A^T B a_j for a violated row j, keeping the signs of the
        // nonzero components of x.
        int best_j = -1;
        double best_viol = 0.0;
        double direction = 1.0;
        for (int j = 0; j < p.m; ++j) {
            const double over = st.tbar()[j] - st.v()[j];   // > 0: above u_j
            const double under = -st.tbar()[j] - st.v()[j];  // > 0: below l_j
            const double viol = std::max(over, under);
            // rows with zero weight take priority; they drive the proof
            const double score = viol * (st.d()[j] == 0.0 ? 2.0 : 1.0);
            if (viol > 0.0 && score > best_viol) {
                best_viol = score;
                best_j = j;
                direction = over >= under ? 1.0 : -1.0;
            }
        }
        if (best_j >= 0) {
            std::vector<double> ba = st.solve_b(p.col(best_j));
            std::vector<double> h(p.m);
            for (int i = 0; i < p.m; ++i)
                h[i] = (i == best_j ? 1.0 : 0.0) - st.d()[i] * p.col_dot(i, ba);
            // largest magnitude keeping nonzero components of x sign-fixed
            double limit = std::numeric_limits<double>::infinity();
            for (int i = 0; i < p.m; ++i) {
                const double xi = base.x[i];
                if (xi == 0.0) continue;
                const double hi = direction * h[i];
                if (xi > 0.0 && hi < 0.0) limit = std::min(limit, xi / -hi);
                if (xi < 0.0 && hi > 0.0) limit = std::min(limit, -xi / hi);
            }
            double mag;
            if (std::isfinite(limit)) {
                mag = 0.5 * limit;
            } else {
                double xs = 0.0, hs = 0.0;
                for (int i = 0; i < p.m; ++i) {
                    xs = std::max(xs, std::fabs(base.x[i]));
                    hs = std::max(hs, std::fabs(h[i]));
                }
                mag = (1.0 + xs) / std::max(hs, 1e-30);
            }
            Certificate pert = base;
            for (int i = 0; i < p.m; ++i) pert.x[i] += direction * mag * h[i];
            if (verify_certificate(p, st.l(), pert, cert_eps))
                return {StateDecision::cert, std::move(pert), true};
            out = {StateDecision::weak, std::move(pert), true};
            return out;
        }
    }

    // f below zero (or degenerate) but the certificate does not pass the
    // strict margin: report it as weak evidence.
    out = {StateDecision::weak, std::move(base), true};
    return out;
}

}  // namespace ellipsoid
