#include "ellipsoid/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "ellipsoid/errors.hpp"

namespace ellipsoid {

namespace {
constexpr double kPivotRel = 1e-12;
}

void SymMatrix::add_outer(std::span<const double> w, double c) {
    for (int i = 0; i < n_; ++i) {
        const double cwi = c * w[i];
        double* row = &a_[static_cast<std::size_t>(i) * n_];
        for (int j = 0; j < n_; ++j) row[j] += cwi * w[j];
    }
}

CholFactor CholFactor::factorize(const SymMatrix& s) {
    const int n = s.dim();
    CholFactor f;
    f.n_ = n;
    f.l_.assign(static_cast<std::size_t>(n) * n, 0.0);

    double max_diag = 0.0;
    for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, s.at(i, i));
    f.pivot_floor_ = kPivotRel * max_diag;

    for (int j = 0; j < n; ++j) {
        double pivot = s.at(j, j);
        const double* lj = &f.l_[static_cast<std::size_t>(j) * n];
        for (int k = 0; k < j; ++k) pivot -= lj[k] * lj[k];
        if (!(pivot > f.pivot_floor_))
            throw NotPositiveDefinite("cholesky pivot " + std::to_string(pivot) +
                                      " at column " + std::to_string(j));
        const double ljj = std::sqrt(pivot);
        f.l_[static_cast<std::size_t>(j) * n + j] = ljj;
        for (int i = j + 1; i < n; ++i) {
            double v = s.at(i, j);
            const double* li = &f.l_[static_cast<std::size_t>(i) * n];
            for (int k = 0; k < j; ++k) v -= li[k] * lj[k];
            f.l_[static_cast<std::size_t>(i) * n + j] = v / ljj;
        }
    }
    return f;
}

void CholFactor::solve_lower(std::span<double> b) const {
    for (int i = 0; i < n_; ++i) {
        double v = b[i];
        const double* li = &l_[static_cast<std::size_t>(i) * n_];
        for (int k = 0; k < i; ++k) v -= li[k] * b[k];
        b[i] = v / li[i];
    }
}

void CholFactor::solve_upper(std::span<double> b) const {
    for (int i = n_ - 1; i >= 0; --i) {
        double v = b[i];
        for (int k = i + 1; k < n_; ++k) v -= l_[static_cast<std::size_t>(k) * n_ + i] * b[k];
        b[i] = v / l_[static_cast<std::size_t>(i) * n_ + i];
    }
}

void CholFactor::solve(std::span<double> b) const {
    solve_lower(b);
    solve_upper(b);
}

std::vector<double> CholFactor::solve_copy(std::vector<double> b) const {
    solve(b);
    return b;
}

void CholFactor::rank_one_modify(std::span<const double> w, double c) {
    if (c == 0.0) return;
    std::vector<double> z(w.begin(), w.end());
    const double scale = std::sqrt(std::fabs(c));
    for (double& v : z) v *= scale;

    if (c > 0.0) {
        // Givens-style update, unconditionally positive definite.
        for (int k = 0; k < n_; ++k) {
            double& lkk = l_[static_cast<std::size_t>(k) * n_ + k];
            const double r = std::hypot(lkk, z[k]);
            const double cth = r / lkk;
            const double sth = z[k] / lkk;
            lkk = r;
            for (int i = k + 1; i < n_; ++i) {
                double& lik = l_[static_cast<std::size_t>(i) * n_ + k];
                lik = (lik + sth * z[i]) / cth;
                z[i] = cth * z[i] - sth * lik;
            }
        }
        for (int k = 0; k < n_; ++k) {
            const double lkk = l_[static_cast<std::size_t>(k) * n_ + k];
            pivot_floor_ = std::max(pivot_floor_, kPivotRel * lkk * lkk);
        }
        return;
    }

    // Hyperbolic-rotation downdate. Work on a copy so a failed downdate
    // leaves the factor intact.
    std::vector<double> l = l_;
    for (int k = 0; k < n_; ++k) {
        double& lkk = l[static_cast<std::size_t>(k) * n_ + k];
        const double r2 = lkk * lkk - z[k] * z[k];
        if (!(r2 > pivot_floor_))
            throw DowndateIndefinite("downdate pivot " + std::to_string(r2) + " at column " +
                                     std::to_string(k));
        const double r = std::sqrt(r2);
        const double cth = r / lkk;
        const double sth = z[k] / lkk;
        lkk = r;
        for (int i = k + 1; i < n_; ++i) {
            double& lik = l[static_cast<std::size_t>(i) * n_ + k];
            lik = (lik - sth * z[i]) / cth;
            z[i] = cth * z[i] - sth * lik;
        }
    }
    l_ = std::move(l);
}

void CholFactor::scale(double s) {
    if (!(s > 0.0)) throw InvalidInput("factor scale must be positive");
    for (double& v : l_) v *= s;
    pivot_floor_ *= s * s;
}

double CholFactor::log_det() const {
    double acc = 0.0;
    for (int i = 0; i < n_; ++i) acc += std::log(l_[static_cast<std::size_t>(i) * n_ + i]);
    return 2.0 * acc;
}

}  // namespace ellipsoid
