#ifndef ELLIPSOID_PROBLEM_HPP
#define ELLIPSOID_PROBLEM_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ellipsoid {

// The inequality system A^T y <= u with A an n x m matrix of nonzero
// columns a_j. Columns are stored contiguously.
struct Problem {
    int n = 0;
    int m = 0;
    std::vector<double> a;  // column-major, column j at a[j * n]
    std::vector<double> u;

    std::span<const double> col(int j) const {
        return {a.data() + static_cast<std::size_t>(j) * n, static_cast<std::size_t>(n)};
    }
    double col_dot(int j, std::span<const double> y) const {
        const double* cj = a.data() + static_cast<std::size_t>(j) * n;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += cj[i] * y[i];
        return acc;
    }
    double col_norm1(int j) const;
    double col_norm2(int j) const;
    double max_abs_entry() const;
    double max_abs_u() const;

    // Every column must be nonzero; throws InvalidInput otherwise.
    void validate() const;
};

// Text format: first line "n m", then n rows of m entries for A, then one
// row of m entries for u, whitespace separated.
Problem read_problem(std::istream& in);
void write_problem(std::ostream& out, const Problem& p);
Problem read_problem_file(const std::string& path);
void write_problem_file(const std::string& path, const Problem& p);

// Component i is a_i^T y - u_i.
std::vector<double> residuals(const Problem& p, std::span<const double> y);

// True iff the largest residual is at most eps.
bool is_feasible(const Problem& p, std::span<const double> y, double eps);

enum class CertKind { two_sided, one_sided };

// Farkas-type infeasibility certificate. Two-sided: A x = 0 and
// u^T x+ - l^T x- < 0. One-sided: A x = 0, x >= 0, u^T x < 0.
struct Certificate {
    std::vector<double> x;
    CertKind kind = CertKind::two_sided;
};

// All tolerance scales are relative to the magnitudes of the inputs.
// Never throws; an invalid certificate simply fails.
bool verify_certificate(const Problem& p, std::span<const double> l, const Certificate& c,
                        double eps);

// One value per line, full precision.
void write_vector(std::ostream& out, std::span<const double> x);
std::vector<double> read_vector(std::istream& in);
void write_vector_file(const std::string& path, std::span<const double> x);
std::vector<double> read_vector_file(const std::string& path);

}  // namespace ellipsoid

#endif
