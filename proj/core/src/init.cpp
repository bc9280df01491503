#include "ellipsoid/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ellipsoid/errors.hpp"

namespace ellipsoid {

const char* to_string(InitScheme s) {
    switch (s) {
        case InitScheme::bigm: return "bigm";
        case InitScheme::fv: return "fv";
        case InitScheme::twophase: return "twophase";
    }
    return "?";
}

InitScheme init_scheme_from_string(const std::string& s) {
    if (s == "bigm") return InitScheme::bigm;
    if (s == "fv") return InitScheme::fv;
    if (s == "twophase") return InitScheme::twophase;
    throw InvalidInput("unknown init scheme: " + s);
}

namespace {

std::vector<double> bounds_from_lambda(const Problem& p, const std::vector<double>& lambda) {
    const int m = p.m;
    std::vector<double> l(m, 0.0);
    for (int j = 0; j < m; ++j) {
        const double* cj = lambda.data() + static_cast<std::size_t>(j) * m;
        double acc = 0.0;
        for (int k = 0; k < m; ++k) acc += cj[k] * p.u[k];
        l[j] = -acc;
    }
    return l;
}

}  // namespace

WorkingSystem big_m_init(const Problem& p, double big_m) {
    if (!(big_m > 0.0)) throw InvalidInput("big-M must be positive");
    const int n = p.n, m = p.m;
    WorkingSystem sys;
    Problem& a = sys.prob;
    a.n = n;
    a.m = m + 2 * n;
    a.a.assign(static_cast<std::size_t>(a.n) * a.m, 0.0);
    std::copy(p.a.begin(), p.a.end(), a.a.begin());
    for (int i = 0; i < n; ++i) {
        a.a[static_cast<std::size_t>(m + i) * n + i] = 1.0;
        a.a[static_cast<std::size_t>(m + n + i) * n + i] = -1.0;
    }
    a.u.assign(a.m, big_m);
    std::copy(p.u.begin(), p.u.end(), a.u.begin());

    std::vector<double> lambda(static_cast<std::size_t>(a.m) * a.m, 0.0);
    const auto put = [&](int row, int col, double v) {
        lambda[static_cast<std::size_t>(col) * a.m + row] = v;
    };
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) {
            const double v = p.a[static_cast<std::size_t>(j) * n + i];
            if (v > 0.0)
                put(m + n + i, j, v);
            else if (v < 0.0)
                put(m + i, j, -v);
        }
    for (int i = 0; i < n; ++i) {
        put(m + n + i, m + i, 1.0);
        put(m + i, m + n + i, 1.0);
    }
    std::vector<double> l = bounds_from_lambda(a, lambda);
    sys.bounds = BoundState(a.m, std::move(l), std::move(lambda));

    sys.d0.assign(a.m, 0.0);
    for (int i = m; i < a.m; ++i) sys.d0[i] = 1.0;
    sys.row_kind.assign(a.m, RowKind::original);
    for (int i = m; i < a.m; ++i) sys.row_kind[i] = RowKind::bound;
    sys.mode = WorkingSystem::Mode::plain;
    return sys;
}

WorkingSystem freund_vera_init(const Problem& p) {
    const int n = p.n, m = p.m;
    const int na = n + 1;
    const int ma = m + 2 * n + 2;
    WorkingSystem sys;
    Problem& a = sys.prob;
    a.n = na;
    a.m = ma;
    a.a.assign(static_cast<std::size_t>(na) * ma, 0.0);
    a.u.assign(ma, 1.0);

    const auto col = [&](int j) { return a.a.data() + static_cast<std::size_t>(j) * na; };
    for (int j = 0; j < m; ++j) {
        const double* src = p.a.data() + static_cast<std::size_t>(j) * n;
        std::copy(src, src + n, col(j));
        col(j)[n] = -p.u[j];
        a.u[j] = 0.0;
    }
    col(m)[n] = -1.0;  // -eta <= 0
    a.u[m] = 0.0;
    for (int i = 0; i < n; ++i) {
        col(m + 1 + i)[i] = 1.0;       // y_i <= 1
        col(m + n + 1 + i)[i] = -1.0;  // -y_i <= 1
    }
    col(m + 2 * n + 1)[n] = 1.0;  // eta <= 1

    std::vector<double> lambda(static_cast<std::size_t>(ma) * ma, 0.0);
    const auto put = [&](int row, int c, double v) {
        lambda[static_cast<std::size_t>(c) * ma + row] = v;
    };
    const int eta_up = m + 2 * n + 1;
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) {
            const double v = p.a[static_cast<std::size_t>(j) * n + i];
            if (v > 0.0)
                put(m + n + 1 + i, j, v);
            else if (v < 0.0)
                put(m + 1 + i, j, -v);
        }
        if (p.u[j] > 0.0)
            put(eta_up, j, p.u[j]);
        else if (p.u[j] < 0.0)
            put(m, j, -p.u[j]);
    }
    put(eta_up, m, 1.0);  // -eta bounded below by -1 through eta <= 1
    for (int i = 0; i < n; ++i) {
        put(m + n + 1 + i, m + 1 + i, 1.0);
        put(m + 1 + i, m + n + 1 + i, 1.0);
    }
    put(m, eta_up, 1.0);  // eta bounded below by 0 through -eta <= 0
    std::vector<double> l = bounds_from_lambda(a, lambda);
    sys.bounds = BoundState(ma, std::move(l), std::move(lambda));

    sys.d0.assign(ma, 0.0);
    for (int i = m; i < ma; ++i) sys.d0[i] = 1.0;
    sys.row_kind.assign(ma, RowKind::bound);
    for (int j = 0; j < m; ++j) sys.row_kind[j] = RowKind::original;
    sys.row_kind[m] = RowKind::homogenizing;
    sys.mode = WorkingSystem::Mode::fv;
    sys.eta_row = m;
    sys.eta_coord = n;
    return sys;
}

namespace {

double strip_to_original(const WorkingSystem& sys, const std::vector<double>& xhat,
                         std::vector<double>& x_orig, int m_orig) {
    x_orig.assign(xhat.begin(), xhat.begin() + m_orig);
    double artificial = 0.0;
    for (int i = m_orig; i < sys.prob.m; ++i)
        if (sys.row_kind[i] == RowKind::bound) artificial += std::fabs(xhat[i]);
    return artificial;
}

double norm1(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += std::fabs(v);
    return acc;
}

Outcome passthrough(Outcome aug) {
    Outcome out = std::move(aug);
    out.y.clear();
    out.cert.reset();
    out.cert_one_sided.reset();
    return out;
}

}  // namespace

Outcome extract_big_m(const Problem& orig, const WorkingSystem& sys, Outcome aug,
                      const SolverConfig& cfg) {
    const double feas_eps = cfg.feas_eps * (1.0 + orig.max_abs_u());
    if (aug.status == Status::feasible_point) {
        if (is_feasible(orig, aug.y, feas_eps)) return aug;
        Outcome out = passthrough(std::move(aug));
        out.status = Status::ambiguous;
        out.note = "augmented feasible point fails the original tolerance";
        return out;
    }
    if (aug.status == Status::infeasible_cert || aug.status == Status::weak_cert) {
        if (!aug.cert_one_sided) return passthrough(std::move(aug));
        std::vector<double> x;
        const double artificial = strip_to_original(sys, aug.cert_one_sided->x, x, orig.m);
        Certificate cand{std::move(x), CertKind::one_sided};
        if (verify_certificate(orig, {}, cand, cfg.cert_eps)) {
            Outcome out = std::move(aug);
            out.status = Status::infeasible_cert;
            out.y.clear();
            out.cert_one_sided = cand;
            out.cert = std::move(cand);
            return out;
        }
        Outcome out = std::move(aug);
        out.y.clear();
        if (artificial > cfg.weight_eps * (norm1(cand.x) + artificial)) {
            out.status = Status::ambiguous;
            out.note = "certificate leans on the artificial bounds";
            out.cert.reset();
            out.cert_one_sided.reset();
        } else {
            out.status = Status::weak_cert;
            out.cert_one_sided = cand;
            out.cert = std::move(cand);
        }
        return out;
    }
    return passthrough(std::move(aug));
}

Outcome extract_fv(const Problem& orig, const WorkingSystem& sys, Outcome aug,
                   const SolverConfig& cfg) {
    const double feas_eps = cfg.feas_eps * (1.0 + orig.max_abs_u());
    if (aug.status == Status::feasible_point) {
        const double eta = aug.y[sys.eta_coord];
        if (eta <= cfg.eta_eps) {
            Outcome out = passthrough(std::move(aug));
            out.status = Status::ambiguous;
            out.note = "homogeneous point has eta at zero";
            return out;
        }
        std::vector<double> y(aug.y.begin(), aug.y.begin() + orig.n);
        for (double& v : y) v /= eta;
        if (is_feasible(orig, y, feas_eps)) {
            Outcome out = std::move(aug);
            out.y = std::move(y);
            return out;
        }
        Outcome out = passthrough(std::move(aug));
        out.status = Status::ambiguous;
        out.note = "descaled point fails the original tolerance";
        return out;
    }
    if (aug.status == Status::infeasible_cert || aug.status == Status::weak_cert) {
        if (!aug.cert_one_sided) return passthrough(std::move(aug));
        std::vector<double> x;
        const double artificial = strip_to_original(sys, aug.cert_one_sided->x, x, orig.m);
        const double xi = aug.cert_one_sided->x[sys.eta_row];
        Certificate cand{std::move(x), CertKind::one_sided};
        Outcome out = std::move(aug);
        out.y.clear();
        if (verify_certificate(orig, {}, cand, cfg.cert_eps)) {
            out.status = Status::infeasible_cert;
            out.cert_one_sided = cand;
            out.cert = std::move(cand);
            return out;
        }
        if (artificial > cfg.weight_eps * (norm1(cand.x) + artificial + xi)) {
            out.status = Status::ambiguous;
            out.note = "certificate leans on the artificial bounds";
            out.cert.reset();
            out.cert_one_sided.reset();
            return out;
        }
        out.status = Status::weak_cert;
        out.note = "weak certificate, xi = " + std::to_string(xi);
        out.cert_one_sided = cand;
        out.cert = std::move(cand);
        return out;
    }
    return passthrough(std::move(aug));
}

namespace {

void merge_stats(RunStats& into, const RunStats& from) {
    into.iterations += from.iterations;
    into.add_steps += from.add_steps;
    into.increase_steps += from.increase_steps;
    into.decrease_steps += from.decrease_steps;
    into.drop_steps += from.drop_steps;
    into.certify_steps += from.certify_steps;
    into.refactorizations += from.refactorizations;
    into.runtime_ms += from.runtime_ms;
}

}  // namespace

Outcome two_phase(const Problem& p, const SolverConfig& cfg) {
    if (cfg.algorithm != Algorithm::sea)
        throw InvalidInput("the two-phase method requires the SEA");

    Problem cone = p;
    std::fill(cone.u.begin(), cone.u.end(), 0.0);
    WorkingSystem sys1 = big_m_init(cone, 1.0);
    sys1.mode = WorkingSystem::Mode::phase1;
    Outcome out1 = run(sys1, cfg, 1);

    const double feas_eps = cfg.feas_eps * (1.0 + p.max_abs_u());

    if (out1.status == Status::feasible_point) {
        std::vector<double> y(out1.y.begin(), out1.y.begin() + p.n);
        double delta = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < p.m; ++j) delta = std::max(delta, p.col_dot(j, y));
        delta = -delta;  // strict margin of the cone point
        if (!(delta > 0.0)) {
            out1.status = Status::ambiguous;
            out1.note = "phase-1 point lost its strict margin";
            return out1;
        }
        double scale = 1.0;
        for (double ui : p.u) scale = std::max(scale, -ui / delta + 1.0);
        for (double& v : y) v *= scale;
        if (is_feasible(p, y, feas_eps)) {
            out1.y = std::move(y);
            return out1;
        }
        out1.status = Status::ambiguous;
        out1.note = "scaled phase-1 point fails the original tolerance";
        return out1;
    }

    if (out1.status == Status::iteration_limit) {
        out1.status = Status::ambiguous;
        out1.note = "phase 1 hit the iteration limit";
        return out1;
    }
    if (out1.status != Status::weak_cert && out1.status != Status::infeasible_cert) return out1;

    // A weak certificate of the cone system: x >= 0 with A x = 0.
    if (!out1.cert_one_sided) {
        out1.status = Status::ambiguous;
        out1.note = "phase-1 certificate missing";
        return out1;
    }
    std::vector<double> x(out1.cert_one_sided->x.begin(),
                          out1.cert_one_sided->x.begin() + p.m);
    const double xmax = *std::max_element(x.begin(), x.end());
    if (!(xmax > 0.0)) {
        out1.status = Status::ambiguous;
        out1.note = "phase-1 certificate vanished on the original rows";
        return out1;
    }

    double ux = 0.0;
    for (int j = 0; j < p.m; ++j) ux += p.u[j] * x[j];
    Certificate cand{x, CertKind::one_sided};
    if (verify_certificate(p, {}, cand, cfg.cert_eps)) {
        out1.status = Status::infeasible_cert;
        out1.cert = cand;
        out1.cert_one_sided = std::move(cand);
        return out1;
    }
    const double gap_scale = p.max_abs_u() * norm1(x) + 1.0;
    if (ux <= cfg.cert_eps * gap_scale) {
        // u^T x at zero within tolerance: weak evidence for the original
        out1.status = Status::weak_cert;
        out1.cert = cand;
        out1.cert_one_sided = std::move(cand);
        return out1;
    }

    // Warm start: bounds l_j = u_j - u^T x / x_j for the supported rows, the
    // phase-1 weights on the original rows, and ellipsoid-generated bounds
    // for the rest.
    std::vector<double> d_warm(out1.final_d.begin(), out1.final_d.begin() + p.m);
    double dmax = 0.0;
    for (double v : d_warm) dmax = std::max(dmax, v);
    for (double& v : d_warm)
        if (v <= 1e-12 * dmax) v = 0.0;

    std::vector<double> lambda(static_cast<std::size_t>(p.m) * p.m, 0.0);
    std::vector<double> l(p.m);
    std::vector<char> supported(p.m, 0);
    for (int j = 0; j < p.m; ++j) {
        if (x[j] > 1e-12 * xmax) {
            supported[j] = 1;
            double* cj = lambda.data() + static_cast<std::size_t>(j) * p.m;
            for (int k = 0; k < p.m; ++k) cj[k] = x[k] / x[j];
            cj[j] = 0.0;
            l[j] = p.u[j] - ux / x[j];
        } else {
            if (d_warm[j] > 0.0) {
                out1.status = Status::ambiguous;
                out1.note = "phase-1 weight without certificate support";
                return out1;
            }
            l[j] = p.u[j] - 2.0 * (1.0 + std::fabs(p.u[j]));  // placeholder, replaced below
        }
    }

    WorkingSystem sys2;
    sys2.prob = p;
    sys2.bounds = BoundState(p.m, l, std::move(lambda));
    sys2.d0 = d_warm;
    sys2.row_kind.assign(p.m, RowKind::original);
    sys2.mode = WorkingSystem::Mode::plain;

    try {
        EllipsoidState warm(sys2.prob, d_warm, l);
        warm.scale_to_unit_f();
        for (int j = 0; j < p.m; ++j) {
            if (supported[j]) continue;
            DualVector dv = bound_from_ellipsoid(warm, j);
            DualVector dvn = nonnegativize(sys2.bounds, p.u, dv);
            if (dvn.bound >= p.u[j]) {
                Certificate ev;
                ev.kind = CertKind::one_sided;
                ev.x = dvn.lam;
                for (double& v : ev.x) v = std::max(v, 0.0);
                ev.x[j] += 1.0;
                if (verify_certificate(p, {}, ev, cfg.cert_eps)) {
                    out1.status = Status::infeasible_cert;
                    out1.cert = ev;
                    out1.cert_one_sided = std::move(ev);
                    return out1;
                }
                accept_bound_capped(sys2.bounds, p, dvn,
                                    p.u[j] - 1e-10 * (1.0 + std::fabs(p.u[j])));
            } else {
                sys2.bounds.set_col(j, dvn.lam, dvn.bound);
            }
        }
    } catch (const Error& e) {
        out1.status = Status::ambiguous;
        out1.note = std::string("phase-2 warm start failed: ") + e.what();
        return out1;
    }

    Outcome out2 = run(sys2, cfg, 2);
    merge_stats(out2.stats, out1.stats);
    out2.trace.insert(out2.trace.begin(), out1.trace.begin(), out1.trace.end());
    return out2;
}

Outcome solve(const Problem& p, InitScheme scheme, const SolverConfig& cfg, double big_m) {
    p.validate();
    switch (scheme) {
        case InitScheme::bigm: {
            WorkingSystem sys = big_m_init(p, big_m);
            Outcome aug = run(sys, cfg);
            return extract_big_m(p, sys, std::move(aug), cfg);
        }
        case InitScheme::fv: {
            WorkingSystem sys = freund_vera_init(p);
            Outcome aug = run(sys, cfg);
            return extract_fv(p, sys, std::move(aug), cfg);
        }
        case InitScheme::twophase: return two_phase(p, cfg);
    }
    throw InvalidInput("unknown init scheme");
}

}  // namespace ellipsoid
