#include "ellipsoid/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ellipsoid/errors.hpp"

namespace ellipsoid {

double Problem::col_norm1(int j) const {
    const auto c = col(j);
    double acc = 0.0;
    for (double v : c) acc += std::fabs(v);
    return acc;
}

double Problem::col_norm2(int j) const {
    const auto c = col(j);
    double acc = 0.0;
    for (double v : c) acc += v * v;
    return std::sqrt(acc);
}

double Problem::max_abs_entry() const {
    double acc = 0.0;
    for (double v : a) acc = std::max(acc, std::fabs(v));
    return acc;
}

double Problem::max_abs_u() const {
    double acc = 0.0;
    for (double v : u) acc = std::max(acc, std::fabs(v));
    return acc;
}

void Problem::validate() const {
    if (n < 1 || m < 1 || a.size() != static_cast<std::size_t>(n) * m ||
        u.size() != static_cast<std::size_t>(m))
        throw InvalidInput("inconsistent problem dimensions");
    for (int j = 0; j < m; ++j) {
        bool nonzero = false;
        for (double v : col(j))
            if (v != 0.0) nonzero = true;
        if (!nonzero) throw InvalidInput("column " + std::to_string(j) + " is zero");
    }
}

Problem read_problem(std::istream& in) {
    Problem p;
    if (!(in >> p.n >> p.m)) throw InvalidInput("problem header: expected \"n m\"");
    if (p.n < 1 || p.m < 1) throw InvalidInput("problem header: dimensions must be positive");
    p.a.assign(static_cast<std::size_t>(p.n) * p.m, 0.0);
    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j < p.m; ++j) {
            double v;
            if (!(in >> v)) throw InvalidInput("problem body: short read in A");
            p.a[static_cast<std::size_t>(j) * p.n + i] = v;
        }
    p.u.resize(p.m);
    for (int j = 0; j < p.m; ++j)
        if (!(in >> p.u[j])) throw InvalidInput("problem body: short read in u");
    p.validate();
    return p;
}

namespace {
void print_value(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}
}  // namespace

void write_problem(std::ostream& out, const Problem& p) {
    out << p.n << ' ' << p.m << '\n';
    for (int i = 0; i < p.n; ++i) {
        for (int j = 0; j < p.m; ++j) {
            if (j) out << ' ';
            print_value(out, p.a[static_cast<std::size_t>(j) * p.n + i]);
        }
        out << '\n';
    }
    for (int j = 0; j < p.m; ++j) {
        if (j) out << ' ';
        print_value(out, p.u[j]);
    }
    out << '\n';
}

Problem read_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    return read_problem(in);
}

void write_problem_file(const std::string& path, const Problem& p) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open " + path);
    write_problem(out, p);
}

std::vector<double> residuals(const Problem& p, std::span<const double> y) {
    std::vector<double> r(p.m);
    for (int j = 0; j < p.m; ++j) r[j] = p.col_dot(j, y) - p.u[j];
    return r;
}

bool is_feasible(const Problem& p, std::span<const double> y, double eps) {
    for (int j = 0; j < p.m; ++j)
        if (p.col_dot(j, y) - p.u[j] > eps) return false;
    return true;
}

bool verify_certificate(const Problem& p, std::span<const double> l, const Certificate& c,
                        double eps) {
    if (c.x.size() != static_cast<std::size_t>(p.m)) return false;
    double norm1 = 0.0;
    for (double v : c.x) norm1 += std::fabs(v);
    if (norm1 == 0.0) return false;

    // A x must vanish relative to the sizes involved.
    std::vector<double> ax(p.n, 0.0);
    for (int j = 0; j < p.m; ++j) {
        const double xj = c.x[j];
        if (xj == 0.0) continue;
        const double* cj = p.a.data() + static_cast<std::size_t>(j) * p.n;
        for (int i = 0; i < p.n; ++i) ax[i] += cj[i] * xj;
    }
    double ax_inf = 0.0;
    for (double v : ax) ax_inf = std::max(ax_inf, std::fabs(v));
    if (ax_inf > eps * norm1 * p.max_abs_entry()) return false;

    const double gap_scale = p.max_abs_u() * norm1 + 1.0;
    if (c.kind == CertKind::one_sided) {
        double xmax = 0.0;
        for (double v : c.x) xmax = std::max(xmax, std::fabs(v));
        for (double v : c.x)
            if (v < -eps * xmax) return false;
        double gap = 0.0;
        for (int j = 0; j < p.m; ++j) gap += p.u[j] * c.x[j];
        return gap <= -eps * gap_scale;
    }

    if (l.size() != static_cast<std::size_t>(p.m)) return false;
    double gap = 0.0;
    for (int j = 0; j < p.m; ++j) {
        const double xj = c.x[j];
        if (xj > 0.0)
            gap += p.u[j] * xj;
        else
            gap -= l[j] * (-xj);
    }
    return gap <= -eps * gap_scale;
}

void write_vector(std::ostream& out, std::span<const double> x) {
    for (double v : x) {
        print_value(out, v);
        out << '\n';
    }
}

std::vector<double> read_vector(std::istream& in) {
    std::vector<double> x;
    double v;
    while (in >> v) x.push_back(v);
    return x;
}

void write_vector_file(const std::string& path, std::span<const double> x) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open " + path);
    write_vector(out, x);
}

std::vector<double> read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    return read_vector(in);
}

}  // namespace ellipsoid
