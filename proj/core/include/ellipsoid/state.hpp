#ifndef ELLIPSOID_STATE_HPP
#define ELLIPSOID_STATE_HPP

#include <span>
#include <vector>

#include "ellipsoid/linalg.hpp"
#include "ellipsoid/problem.hpp"

namespace ellipsoid {

// E(d, l) = { y : (y - ybar)^T (A D A^T) (y - ybar) <= f(d, l) },
// the aggregation of the rank-one quadratics d_j (a_j^T y - l_j)(a_j^T y - u_j)
// for the two-sided system l <= A^T y <= u.
//
// Cached alongside the factor of A D A^T:
//   r = (u + l) / 2, v = (u - l) / 2, ybar = (ADA^T)^{-1} A D r,
//   tbar = A^T ybar - r, w_i = a_i^T (ADA^T)^{-1} a_i,
//   f (kept current through each update), p = -log det A D A^T.
//
// tbar, r, v are recomputed from ybar after every step rather than patched
// incrementally; w is patched (each step changes the inverse by rank one)
// and rebuilt on refactorize().
class EllipsoidState {
  public:
    // Throws NotPositiveDefinite if A D A^T is not (numerically) PD.
    EllipsoidState(const Problem& p, std::vector<double> d, std::vector<double> l);

    const Problem& problem() const { return *prob_; }
    int n() const { return prob_->n; }
    int m() const { return prob_->m; }

    std::span<const double> d() const { return d_; }
    std::span<const double> l() const { return l_; }
    std::span<const double> r() const { return r_; }
    std::span<const double> v() const { return v_; }
    std::span<const double> tbar() const { return tbar_; }
    std::span<const double> center() const { return ybar_; }
    std::span<const double> semiwidth_sq() const { return w_; }  // a_i^T B a_i

    double f() const { return f_; }
    double p() const { return p_; }

    // v^T D v - tbar^T D tbar, recomputed from the caches.
    double f_value() const;
    // r^T D A^T B A D r - r^T D r + v^T D v, through solves.
    double f_crosscheck() const;

    // Largest a_i^T (y - ybar) over E; requires f > 0.
    double gamma(int i) const;

    // n ln f + p; +inf when f <= 0.
    double g_value() const;
    // n f + p - n, defined for any f.
    double g_tilde() const;

    // d <- d / f so that f becomes one. The ellipsoid is unchanged.
    void scale_to_unit_f();

    // d_j += sigma / ((1 - sigma) gamma_j^2), with the center, factor, f, p
    // and semi-width caches updated by the closed forms. Requires f = 1 on
    // entry and sigma < 1.
    void apply_sigma(int j, double sigma);

    // Takes d_j to exactly zero (the sigma_0 step).
    void apply_drop(int j);

    // Moves the center onto the boundary of constraint j by increasing d_j:
    // sigma = (a_j^T ybar - u_j) / tbar_j. Requires a_j^T ybar >= u_j and
    // tbar_j > 0. Returns the sigma used.
    double pareto_center_to_boundary(int j);

    // Raises l_j to new_lj while increasing d_j so the center and f are
    // unchanged. Requires the center on the boundary of constraint j and
    // l_j < new_lj < u_j (InvalidInput otherwise).
    void pareto_raise_bound(int j, double new_lj);

    // Rebuilds the factor and every cache from d and l.
    // Throws NotPositiveDefinite when the refreshed matrix fails.
    void refactorize();

    // (y - ybar)^T (A D A^T) (y - ybar)
    double mahalanobis(std::span<const double> y) const;

    // x = D tbar, the aggregation multipliers.
    std::vector<double> certificate_vector() const;

    // B a_j through the factor.
    std::vector<double> solve_b(std::span<const double> rhs) const;

    // |f_value - cached f| checked against tol * (1 + |f|); used by tests.
    bool cache_consistent(double tol) const;

  private:
    void rebuild_from_factor();
    void recompute_tbar();
    void weight_step(int j, double sigma, double coeff);

    const Problem* prob_;
    std::vector<double> d_, l_, r_, v_, tbar_, w_, ybar_;
    CholFactor chol_;
    double f_ = 0.0;
    double p_ = 0.0;
};

// Decision taken from the sign of f and the center, plus the unconditional
// check of x = D tbar as a certificate.
struct StateDecision {
    enum Kind { none, feasible, cert, weak } kind = none;
    Certificate certificate;  // set for cert (verified) and weak (not verified)
    bool collapsed = false;   // f at or below its zero tolerance
};

StateDecision certificate_from_state(const EllipsoidState& st, bool center_feasible,
                                     double cert_eps, double f_zero_eps_rel);

}  // namespace ellipsoid

#endif
