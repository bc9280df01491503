#ifndef ELLIPSOID_LINALG_HPP
#define ELLIPSOID_LINALG_HPP

#include <span>
#include <vector>

namespace ellipsoid {

// Dense symmetric matrix, row-major n x n storage.
class SymMatrix {
  public:
    SymMatrix() = default;
    explicit SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

    int dim() const { return n_; }
    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    // rank-one accumulation: this += c * w w^T
    void add_outer(std::span<const double> w, double c);

  private:
    int n_ = 0;
    std::vector<double> a_;
};

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
//
// The factored matrix is never stored; every use of its inverse goes through
// triangular solves. Rank-one updates and downdates are applied in place,
// downdates by hyperbolic rotations. Pivots are compared against a floor of
// 1e-12 times the largest diagonal seen, so the singularity guard is
// scale-invariant.
class CholFactor {
  public:
    CholFactor() = default;

    // Factorizes s = L L^T. Throws NotPositiveDefinite if a pivot falls at or
    // below the floor.
    static CholFactor factorize(const SymMatrix& s);

    int dim() const { return n_; }

    // L(i, j), i >= j.
    double entry(int i, int j) const { return l_[static_cast<std::size_t>(i) * n_ + j]; }

    // Solves L x = b in place.
    void solve_lower(std::span<double> b) const;
    // Solves L^T x = b in place.
    void solve_upper(std::span<double> b) const;
    // Solves (L L^T) x = b in place.
    void solve(std::span<double> b) const;
    std::vector<double> solve_copy(std::vector<double> b) const;

    // Replaces the factor by that of S + c w w^T. Throws DowndateIndefinite
    // if c < 0 drives a pivot below the floor; the factor is left untouched
    // in that case. c == 0 is a no-op.
    void rank_one_modify(std::span<const double> w, double c);

    // Rescales the factored matrix by s^2 > 0 (L by s).
    void scale(double s);

    // log det(L L^T) = 2 sum_i log L_ii.
    double log_det() const;

  private:
    int n_ = 0;
    std::vector<double> l_;
    double pivot_floor_ = 0.0;
};

}  // namespace ellipsoid

#endif
