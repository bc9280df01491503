#include "ellipsoid/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "ellipsoid/errors.hpp"
#include "ellipsoid/steps.hpp"

namespace ellipsoid {

const char* to_string(Status s) {
    switch (s) {
        case Status::feasible_point: return "feasible";
        case Status::infeasible_cert: return "infeasible";
        case Status::weak_cert: return "weak";
        case Status::iteration_limit: return "limit";
        case Status::numerical_failure: return "numfail";
        case Status::ambiguous: return "ambiguous";
    }
    return "?";
}

const char* to_string(Algorithm a) { return a == Algorithm::sea ? "sea" : "oea"; }

const char* to_string(StepKind k) {
    switch (k) {
        case StepKind::add: return "add";
        case StepKind::increase: return "increase";
        case StepKind::decrease: return "decrease";
        case StepKind::drop: return "drop";
        case StepKind::pareto_a: return "pareto-a";
        case StepKind::pareto_d: return "pareto-d";
        case StepKind::certify: return "certify";
    }
    return "?";
}

long default_iteration_cap(int n, int m) {
    return static_cast<long>(200.0 * n * std::log(static_cast<double>(n) + m)) + 100;
}

std::vector<double> WorkingSystem::restrict_to_original(std::span<const double> x) const {
    std::vector<double> out;
    out.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        if (row_kind[i] == RowKind::original) out.push_back(x[i]);
    return out;
}

namespace {

struct StepResult {
    enum Kind { stepped, evidence, collapse, stalled } kind = stalled;
    Certificate cert;  // one-sided candidate for evidence
    IterationRecord rec;
};

struct FeasGate {
    bool feasible = false;
    int forced_j = -1;
};

FeasGate feasibility_gate(const WorkingSystem& sys, const EllipsoidState& st, double feas_eps,
                          double eta_eps, double phase1_margin) {
    FeasGate gate;
    const int m = st.m();
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) worst = std::max(worst, st.tbar()[i] - st.v()[i]);
    if (worst > feas_eps) return gate;

    switch (sys.mode) {
        case WorkingSystem::Mode::plain:
            gate.feasible = true;
            return gate;
        case WorkingSystem::Mode::fv: {
            const double eta = st.center()[sys.eta_coord];
            if (eta > eta_eps) {
                gate.feasible = true;
            } else {
                gate.forced_j = sys.eta_row;  // pretend -eta <= 0 is violated
            }
            return gate;
        }
        case WorkingSystem::Mode::phase1: {
            // a strict interior point of A^T y <= 0 is required
            int worst_j = -1;
            double worst_orig = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                if (sys.row_kind[i] != RowKind::original) continue;
                const double resid = st.tbar()[i] - st.v()[i];
                if (resid > worst_orig) {
                    worst_orig = resid;
                    worst_j = i;
                }
            }
            if (worst_orig <= -phase1_margin) {
                gate.feasible = true;
            } else {
                gate.forced_j = worst_j;  // continue as if strictly violated
            }
            return gate;
        }
    }
    return gate;
}

class Driver {
  public:
    Driver(WorkingSystem& sys, const SolverConfig& cfg, int phase)
        : sys_(sys), cfg_(cfg), phase_(phase), p_(sys.prob) {
        col_norm_.resize(p_.m);
        for (int j = 0; j < p_.m; ++j) col_norm_[j] = p_.col_norm2(j);
    }

    Outcome solve() {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = loop();
        } catch (const Error& e) {
            out.status = Status::numerical_failure;
            out.note = e.what();
            out.stats = stats_;
            out.trace = std::move(trace_);
        }
        out.stats.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        if (!cfg_.trace_path.empty()) write_trace_csv(cfg_.trace_path, out.trace);
        return out;
    }

  private:
    WorkingSystem& sys_;
    const SolverConfig& cfg_;
    int phase_;
    const Problem& p_;
    std::vector<double> col_norm_;
    RunStats stats_;
    std::vector<IterationRecord> trace_;
    const EllipsoidState* st_ = nullptr;
    long ignore_cooldown_ = 0;
    std::string note_;

    bool want_trace() const {
        return cfg_.collect_trace || !cfg_.trace_path.empty() || cfg_.observer != nullptr;
    }

    void record(EllipsoidState& st, IterationRecord rec) {
        rec.f = st.f();
        rec.p = st.p();
        rec.g = st.g_value();
        rec.phase = phase_;
        if (want_trace()) {
            trace_.push_back(rec);
            if (cfg_.observer) cfg_.observer({rec.iter, st, trace_.back(), phase_});
        }
        switch (rec.kind) {
            case StepKind::add: ++stats_.add_steps; break;
            case StepKind::increase: ++stats_.increase_steps; break;
            case StepKind::decrease: ++stats_.decrease_steps; break;
            case StepKind::drop: ++stats_.drop_steps; break;
            case StepKind::certify: ++stats_.certify_steps; break;
            default: break;
        }
    }

    Outcome finish(Status s, EllipsoidState& st, Outcome&& out) {
        out.status = s;
        out.stats = stats_;
        if (out.note.empty()) out.note = note_;
        out.trace = std::move(trace_);
        out.final_d.assign(st.d().begin(), st.d().end());
        out.final_l.assign(st.l().begin(), st.l().end());
        return std::move(out);
    }

    Outcome certified(EllipsoidState& st, Certificate cert) {
        Outcome out;
        if (cert.kind == CertKind::two_sided) {
            Certificate oneside = one_sided_combination(sys_.bounds, cert.x);
            out.cert = std::move(cert);
            out.cert_one_sided = std::move(oneside);
        } else {
            out.cert = cert;
            out.cert_one_sided = std::move(cert);
        }
        return finish(Status::infeasible_cert, st, std::move(out));
    }

    // Phase-1 weak certificates are only usable once the surviving weights
    // sit on original rows whose multiplier components are positive.
    bool phase1_usable(const EllipsoidState& st, const Certificate& cert) const {
        double dmax = 0.0, xmax = 0.0;
        for (double v : st.d()) dmax = std::max(dmax, v);
        for (double v : cert.x) xmax = std::max(xmax, std::fabs(v));
        if (xmax == 0.0) return false;
        for (int i = 0; i < p_.m; ++i) {
            if (st.d()[i] <= 1e-6 * dmax) continue;
            if (sys_.row_kind[i] != RowKind::original) return false;
            if (cert.x[i] <= 1e-9 * xmax) return false;
        }
        return true;
    }

    // A certificate may only stop the run when it settles the original
    // system; otherwise the run keeps cutting (the weights it leans on fade
    // over subsequent steps).
    bool cert_terminates(const EllipsoidState& st, const Certificate& cert) const {
        if (sys_.mode == WorkingSystem::Mode::phase1) return phase1_usable(st, cert);
        if (!sys_.original) return true;
        const Certificate onesided =
            cert.kind == CertKind::one_sided ? cert : one_sided_combination(sys_.bounds, cert.x);
        Certificate restricted{sys_.restrict_to_original(onesided.x), CertKind::one_sided};
        return verify_certificate(*sys_.original, {}, restricted, cfg_.cert_eps);
    }

    Outcome loop() {
        EllipsoidState st(p_, sys_.d0,
                          std::vector<double>(sys_.bounds.l().begin(), sys_.bounds.l().end()));
        st_ = &st;
        const long cap =
            cfg_.max_iterations > 0 ? cfg_.max_iterations : default_iteration_cap(p_.n, p_.m);
        // tolerance scale from the genuine rows, not the artificial bounds
        double u_scale = 0.0;
        for (int i = 0; i < p_.m; ++i)
            if (sys_.row_kind[i] == RowKind::original)
                u_scale = std::max(u_scale, std::fabs(p_.u[i]));
        const double feas_eps = cfg_.feas_eps * (1.0 + u_scale);

        if (cfg_.observer) {
            IterationRecord rec;
            rec.iter = 0;
            rec.f = st.f();
            rec.p = st.p();
            rec.g = st.g_value();
            rec.phase = phase_;
            cfg_.observer({0, st, rec, phase_});
        }

        for (long iter = 1; iter <= cap; ++iter) {
            stats_.iterations = iter;

            // refactorization policy: periodic, or when the two forms of f
            // disagree beyond the drift tolerance
            try {
                const double fv = st.f_value();
                const double fx = st.f_crosscheck();
                const double drift_scale = cfg_.refactor_drift * (1.0 + std::fabs(fv));
                const bool drift =
                    std::fabs(fv - fx) > drift_scale || std::fabs(st.f() - fv) > drift_scale;
                if (drift || iter % cfg_.refactor_period == 0) {
                    st.refactorize();
                    ++stats_.refactorizations;
                }
            } catch (const NotPositiveDefinite& e) {
                // the matrix died; fall back to whatever evidence is left
                StateDecision dec = certificate_from_state(st, false, cfg_.cert_eps,
                                                           cfg_.f_zero_eps);
                if (dec.kind == StateDecision::cert && cert_terminates(st, dec.certificate))
                    return certified(st, std::move(dec.certificate));
                if (dec.kind == StateDecision::cert || dec.kind == StateDecision::weak) {
                    Outcome out;
                    out.cert = dec.certificate;
                    out.cert_one_sided =
                        dec.certificate.kind == CertKind::one_sided
                            ? dec.certificate
                            : one_sided_combination(sys_.bounds, dec.certificate.x);
                    out.note = std::string("refactorization failed: ") + e.what();
                    return finish(Status::weak_cert, st, std::move(out));
                }
                Outcome out;
                out.note = e.what();
                return finish(Status::numerical_failure, st, std::move(out));
            }

            const FeasGate gate =
                feasibility_gate(sys_, st, feas_eps, cfg_.eta_eps, cfg_.phase1_margin);
            if (gate.feasible) {
                Outcome out;
                out.y.assign(st.center().begin(), st.center().end());
                return finish(Status::feasible_point, st, std::move(out));
            }

            if (ignore_cooldown_ > 0) {
                --ignore_cooldown_;
            } else {
                StateDecision dec =
                    certificate_from_state(st, false, cfg_.cert_eps, cfg_.f_zero_eps);
                if (dec.kind == StateDecision::cert || dec.kind == StateDecision::weak) {
                    const bool strict = dec.kind == StateDecision::cert;
                    if (strict && cert_terminates(st, dec.certificate))
                        return certified(st, std::move(dec.certificate));
                    if (dec.collapsed) {
                        // nothing left to cut; report the evidence we have
                        if (sys_.mode == WorkingSystem::Mode::phase1 &&
                            !phase1_usable(st, dec.certificate)) {
                            Outcome out;
                            out.note = "phase-1 collapsed without a usable certificate";
                            return finish(Status::ambiguous, st, std::move(out));
                        }
                        Outcome out;
                        out.cert = dec.certificate;
                        out.cert_one_sided =
                            dec.certificate.kind == CertKind::one_sided
                                ? dec.certificate
                                : one_sided_combination(sys_.bounds, dec.certificate.x);
                        return finish(strict ? Status::infeasible_cert : Status::weak_cert, st,
                                      std::move(out));
                    }
                    // certificate exists but does not settle the original
                    // system yet; keep iterating
                    note_ = "certificate deferred; kept iterating";
                    ignore_cooldown_ = 25;
                }
            }

            if (!(st.f_value() > 0.0)) {
                Outcome out;
                out.note = "nonpositive f without a usable certificate";
                return finish(sys_.mode == WorkingSystem::Mode::plain
                                  ? Status::numerical_failure
                                  : Status::ambiguous,
                              st, std::move(out));
            }
            st.scale_to_unit_f();

            StepResult res;
            try {
                res = cfg_.algorithm == Algorithm::sea ? sea_iteration(st, iter, gate.forced_j)
                                                       : oea_iteration(st, iter, gate.forced_j);
            } catch (const Error&) {
                // one retry on a fresh factorization
                st.refactorize();
                ++stats_.refactorizations;
                st.scale_to_unit_f();
                res = cfg_.algorithm == Algorithm::sea ? sea_iteration(st, iter, gate.forced_j)
                                                       : oea_iteration(st, iter, gate.forced_j);
            }

            if (res.kind == StepResult::evidence) {
                record(st, res.rec);
                return certified(st, std::move(res.cert));
            }
            if (res.kind == StepResult::collapse) {
                // the forced row cannot reduce volume any further
                StateDecision dec =
                    certificate_from_state(st, false, cfg_.cert_eps, cfg_.f_zero_eps);
                Certificate cert = dec.kind == StateDecision::cert || dec.kind == StateDecision::weak
                                       ? std::move(dec.certificate)
                                       : Certificate{st.certificate_vector(), CertKind::two_sided};
                if (dec.kind == StateDecision::cert && cert_terminates(st, cert))
                    return certified(st, std::move(cert));
                if (sys_.mode == WorkingSystem::Mode::phase1 && !phase1_usable(st, cert)) {
                    Outcome out;
                    out.note = "phase-1 stalled without a usable certificate";
                    return finish(Status::ambiguous, st, std::move(out));
                }
                Outcome out;
                out.cert = cert;
                out.cert_one_sided = cert.kind == CertKind::one_sided
                                         ? cert
                                         : one_sided_combination(sys_.bounds, cert.x);
                return finish(Status::weak_cert, st, std::move(out));
            }
            if (res.kind == StepResult::stalled) {
                Outcome out;
                out.note = "no admissible step";
                return finish(Status::ambiguous, st, std::move(out));
            }
            record(st, res.rec);
        }

        Outcome out;
        return finish(Status::iteration_limit, st, std::move(out));
    }

    int count_violated(const EllipsoidState& st) const {
        int c = 0;
        for (int i = 0; i < p_.m; ++i)
            if (st.tbar()[i] - st.v()[i] > 0.0) ++c;
        return c;
    }

    // Shared by both algorithms: best bound, the two Pareto moves, then the
    // volume-minimizing weight increase.
    StepResult increase_step(EllipsoidState& st, long iter, int j, bool forced) {
        StepResult res;
        res.rec.iter = iter;
        res.rec.j = j;
        res.rec.violated = count_violated(st);
        res.rec.forced = forced;
        res.rec.kind = st.d()[j] == 0.0 ? StepKind::add : StepKind::increase;

        DualVector dv = cfg_.bound_mode == BoundMode::best
                            ? best_lower_bound(st, j)
                            : zero_jth_component(st, bound_from_ellipsoid(st, j));
        DualVector dvn = nonnegativize(sys_.bounds, p_.u, dv);

        const double ugap = 1e-8 * (1.0 + std::fabs(p_.u[j]));
        if (dvn.bound > p_.u[j]) {
            Certificate cand;
            cand.kind = CertKind::one_sided;
            cand.x = dvn.lam;
            for (double& v : cand.x) v = std::max(v, 0.0);
            cand.x[j] += 1.0;
            if (verify_certificate(p_, sys_.bounds.l(), cand, cfg_.cert_eps) &&
                cert_terminates(st, cand)) {
                res.kind = StepResult::evidence;
                res.cert = std::move(cand);
                res.rec.kind = StepKind::certify;
                return res;
            }
            // formally above u_j but not decisive: cap just below and go on
            accept_bound_capped(sys_.bounds, p_, dvn, p_.u[j] - ugap);
        } else if (dvn.bound > p_.u[j] - ugap) {
            accept_bound_capped(sys_.bounds, p_, dvn, p_.u[j] - ugap);
        } else {
            accept_bound(sys_.bounds, p_, dvn);
        }

        // Pareto move (a): pull the center onto the violated boundary;
        // skipped for razor-thin slabs where it degenerates
        if (st.tbar()[j] - st.v()[j] > 0.0 && st.tbar()[j] > 0.0 &&
            st.v()[j] > 1e-9 * (1.0 + std::fabs(p_.u[j])))
            st.pareto_center_to_boundary(j);

        // Pareto move (d): fold the best certified bound into the ellipsoid
        const double reg = sys_.bounds.l(j);
        if (reg > st.l()[j] && reg < p_.u[j]) {
            const bool on_boundary =
                std::fabs(st.tbar()[j] - st.v()[j]) <= 1e-7 * (1.0 + std::fabs(p_.u[j]));
            if (st.d()[j] == 0.0 || on_boundary) st.pareto_raise_bound(j, reg);
        }

        st.scale_to_unit_f();
        const CutDepths depths = cut_depths(st, j);
        double alpha = depths.alpha;
        if (std::fabs(alpha) < 1e-12) alpha = 0.0;
        const int dim =
            cfg_.eta_dim > 0 ? cfg_.eta_dim : (cfg_.algorithm == Algorithm::sea ? p_.n : p_.m);
        double sigma = sigma_eta(alpha, depths.beta, dim);
        if (cfg_.algorithm == Algorithm::oea) sigma = std::max(sigma, 2.0 / (p_.m + 1.0));
        if (forced && !(sigma > 0.0)) {
            res.kind = StepResult::collapse;
            return res;
        }
        if (!(sigma < 1.0)) sigma = 2.0 / (dim + 1.0);

        const double g0 = st.g_value();
        st.apply_sigma(j, sigma);
        res.kind = StepResult::stepped;
        res.rec.sigma = sigma;
        res.rec.alpha_at_sigma = alpha;
        res.rec.has_sigma_step = true;
        res.rec.dg_sigma = st.g_value() - g0;
        return res;
    }

    StepResult sea_iteration(EllipsoidState& st, long iter, int forced_j) {
        const int n = p_.n, m = p_.m;
        int j_max = -1, j_min = -1, j_min_bound = -1;
        double best = -std::numeric_limits<double>::infinity();
        double worst = std::numeric_limits<double>::infinity();
        double worst_bound = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            const double wsq = st.semiwidth_sq()[i];
            if (!(wsq > 0.0)) continue;
            const double ratio = (st.tbar()[i] - st.v()[i]) / std::sqrt(wsq);
            if (ratio > best) {
                best = ratio;
                j_max = i;
            }
            if (st.d()[i] > 0.0) {
                if (ratio < worst) {
                    worst = ratio;
                    j_min = i;
                }
                if (sys_.row_kind[i] != RowKind::original && ratio < worst_bound) {
                    worst_bound = ratio;
                    j_min_bound = i;
                }
            }
        }
        if (forced_j >= 0) j_max = forced_j;
        const bool violated = j_max >= 0 && (forced_j >= 0 || best > 0.0);

        std::optional<std::pair<int, SigmaMenu>> decrease_plan;
        std::optional<CutDepths> depths_min;
        if (cfg_.allow_decrease) {
            // bound rows first: drops exist to clear redundant rows and,
            // with big-M style starts, the artificial bounds
            const int candidates[2] = {j_min_bound, j_min};
            for (int pass = 0; pass < 2; ++pass) {
                const int cand = candidates[pass];
                if (cand < 0 || (pass == 1 && cand == j_min_bound)) continue;
                CutDepths depths = cut_depths(st, cand);
                if (!decrease_eligible(depths.alpha, depths.beta, n)) continue;
                SigmaMenu menu = plan_decrease(st, cand, depths);
                if (menu.kind == StepCase::certify) {
                    StepResult res;
                    res.kind = StepResult::stepped;
                    res.rec.iter = iter;
                    res.rec.j = cand;
                    res.rec.kind = StepKind::certify;
                    res.rec.sigma = menu.chosen;
                    res.rec.violated = count_violated(st);
                    st.apply_sigma(cand, menu.chosen);
                    return res;
                }
                if (menu.kind == StepCase::drop) {
                    // volume must not grow
                    const double dg =
                        n * std::log(zeta_of_sigma(depths.alpha, depths.beta, menu.sigma0)) +
                        std::log1p(-menu.sigma0);
                    if (dg <= 1e-12) {
                        StepResult res;
                        res.kind = StepResult::stepped;
                        res.rec.iter = iter;
                        res.rec.j = cand;
                        res.rec.kind = StepKind::drop;
                        res.rec.sigma = menu.sigma0;
                        res.rec.violated = count_violated(st);
                        const double g0 = st.g_value();
                        st.apply_drop(cand);
                        res.rec.dg_sigma = st.g_value() - g0;
                        return res;
                    }
                    continue;
                }
                if (cand == j_min) {
                    decrease_plan = {cand, menu};
                    depths_min = depths;
                }
            }
        }

        bool take_decrease = false;
        if (decrease_plan && violated && forced_j < 0) {
            const CutDepths dmax = cut_depths(st, j_max);
            const double target = -1.0 / n;
            const double p_inc = std::min(1.0, dmax.alpha) * std::min(1.0, dmax.beta);
            const double p_dec =
                std::max(-1.0, depths_min->alpha) * std::min(1.0, depths_min->beta);
            take_decrease = std::fabs(p_inc - target) < std::fabs(p_dec - target);
        } else if (decrease_plan && !violated) {
            take_decrease = true;
        }

        if (take_decrease) {
            const auto& [cand, menu] = *decrease_plan;
            StepResult res;
            res.kind = StepResult::stepped;
            res.rec.iter = iter;
            res.rec.j = cand;
            res.rec.kind = StepKind::decrease;
            res.rec.sigma = menu.chosen;
            res.rec.violated = count_violated(st);
            res.rec.alpha_at_sigma = depths_min->alpha;
            res.rec.has_sigma_step = true;
            const double g0 = st.g_value();
            st.apply_sigma(cand, menu.chosen);
            res.rec.dg_sigma = st.g_value() - g0;
            return res;
        }
        if (violated) return increase_step(st, iter, j_max, forced_j >= 0);
        return {};
    }

    StepResult oea_iteration(EllipsoidState& st, long iter, int forced_j) {
        int j = forced_j;
        if (j < 0) {
            double best = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < p_.m; ++i) {
                const double ratio = (st.tbar()[i] - st.v()[i]) / col_norm_[i];
                if (ratio > best) {
                    best = ratio;
                    j = i;
                }
            }
            if (j < 0 || !(best > 0.0)) return {};
        }
        return increase_step(st, iter, j, forced_j >= 0);
    }
};

}  // namespace

Outcome run(WorkingSystem& sys, const SolverConfig& cfg, int phase) {
    Driver driver(sys, cfg, phase);
    return driver.solve();
}

void write_trace_csv(const std::string& path, const std::vector<IterationRecord>& trace) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open " + path);
    out << "iter,j,step,sigma,f,p,g,violated\n";
    char buf[160];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof buf, "%ld,%d,%s,%.12g,%.12g,%.12g,%.12g,%d\n", r.iter, r.j,
                      to_string(r.kind), r.sigma, r.f, r.p, r.g, r.violated);
        out << buf;
    }
}

}  // namespace ellipsoid
