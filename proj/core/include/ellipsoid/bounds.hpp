#ifndef ELLIPSOID_BOUNDS_HPP
#define ELLIPSOID_BOUNDS_HPP

#include <optional>
#include <span>
#include <vector>

#include "ellipsoid/problem.hpp"
#include "ellipsoid/state.hpp"

namespace ellipsoid {

// Certified lower bounds l on A^T y together with the nonnegative multiplier
// matrix that proves them: A Lambda = -A, Lambda >= 0, l = -Lambda^T u,
// column j certifying l_j.
class BoundState {
  public:
    BoundState() = default;
    BoundState(int m, std::vector<double> l, std::vector<double> lambda);

    int m() const { return m_; }
    std::span<const double> l() const { return l_; }
    double l(int j) const { return l_[j]; }
    std::span<const double> col(int j) const {
        return {lambda_.data() + static_cast<std::size_t>(j) * m_, static_cast<std::size_t>(m_)};
    }
    void set_col(int j, std::span<const double> lam, double bound);

    // Lambda x for x >= 0 supported anywhere.
    std::vector<double> lambda_times(std::span<const double> x) const;

    // Checks A Lambda = -A (relative), Lambda >= 0 and l = -Lambda^T u.
    bool verify(const Problem& p, double tol) const;

  private:
    int m_ = 0;
    std::vector<double> l_;
    std::vector<double> lambda_;  // m x m, column-major
};

// theta(lambda) = l^T lambda_- - u^T lambda_+, the lower bound on a_j^T y
// certified by any lambda with A lambda = -a_j.
double theta(std::span<const double> l, std::span<const double> u, std::span<const double> lam);

struct DualVector {
    std::vector<double> lam;
    int j = -1;
    double bound = 0.0;
};

// lambda = gamma_j D (A^T (ybar - gamma_j^{-1} B a_j) - r); theta equals the
// smallest a_j^T y over E(d, l). Requires f = 1.
DualVector bound_from_ellipsoid(const EllipsoidState& st, int j);

// (lambda - lambda_j e_j) / (1 + lambda_j); drops the self-multiplier without
// hurting the bound unless the bound already exceeds u_j.
DualVector zero_jth_component(const EllipsoidState& st, const DualVector& dv);

// Lambda lambda_- + lambda_+, nonnegative with the same bound.
DualVector nonnegativize(const BoundState& bs, std::span<const double> u, const DualVector& dv);

// Maximizes theta over the dual vectors mu D tbar + nu D A^T B a_j + pi e_j
// with A lambda = -a_j and lambda_j = 0; piecewise-linear concave in mu,
// solved by a sorted sweep of the component sign changes. Requires f = 1
// and returns the maximizer.
DualVector best_lower_bound(const EllipsoidState& st, int j);

// Installs a nonnegative dual vector into the registry. Returns a one-sided
// certificate lambda + e_j when the bound exceeds u_j; otherwise replaces
// column j when the bound improves on l_j. Throws InvalidInput when the
// vector has negative entries beyond tolerance.
std::optional<Certificate> accept_bound(BoundState& bs, const Problem& p, const DualVector& dv);

// Caps the registry bound at `cap` < u_j by blending the new column with the
// incumbent; used when a bound formally crosses u_j but the certificate does
// not withstand verification.
void accept_bound_capped(BoundState& bs, const Problem& p, const DualVector& dv, double cap);

// x_hat = x_+ + Lambda x_-; InvalidInput if the input certificate fails
// verification against the registry bounds.
Certificate convert_to_one_sided(const Problem& p, const BoundState& bs, const Certificate& c,
                                 double eps);

// The raw combination without the validity gate (weak certificates use it).
Certificate one_sided_combination(const BoundState& bs, std::span<const double> x);

}  // namespace ellipsoid

#endif
