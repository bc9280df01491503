#ifndef ELLIPSOID_SOLVER_HPP
#define ELLIPSOID_SOLVER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ellipsoid/bounds.hpp"
#include "ellipsoid/problem.hpp"
#include "ellipsoid/state.hpp"

namespace ellipsoid {

enum class Algorithm { sea, oea };
enum class BoundMode { best, classic };

enum class Status {
    feasible_point,
    infeasible_cert,
    weak_cert,
    iteration_limit,
    numerical_failure,
    ambiguous,
};

const char* to_string(Status s);
const char* to_string(Algorithm a);

enum class StepKind { add, increase, decrease, drop, pareto_a, pareto_d, certify };
const char* to_string(StepKind k);

enum class RowKind { original, bound, homogenizing };

struct RunStats {
    long iterations = 0;
    long add_steps = 0;
    long increase_steps = 0;
    long decrease_steps = 0;
    long drop_steps = 0;
    long certify_steps = 0;
    long refactorizations = 0;
    double runtime_ms = 0.0;
};

struct IterationRecord {
    long iter = 0;
    int j = -1;
    StepKind kind = StepKind::increase;
    double sigma = 0.0;
    double f = 0.0;
    double p = 0.0;
    double g = 0.0;
    int violated = 0;
    // depth of the cut when the volume-minimizing sigma was applied; NaN for
    // steps that skip it
    double alpha_at_sigma = 0.0;
    bool has_sigma_step = false;
    // g after minus g before the sigma application alone
    double dg_sigma = 0.0;
    bool forced = false;
    int phase = 0;
};

struct Outcome {
    Status status = Status::iteration_limit;
    std::vector<double> y;
    std::optional<Certificate> cert;
    std::optional<Certificate> cert_one_sided;
    RunStats stats;
    std::string note;
    std::vector<IterationRecord> trace;
    std::vector<double> final_d;
    std::vector<double> final_l;
};

// The bounded two-sided system a solver run operates on, together with the
// provenance of each row.
struct WorkingSystem {
    enum class Mode { plain, fv, phase1 };

    Problem prob;
    BoundState bounds;
    std::vector<double> d0;
    std::vector<RowKind> row_kind;
    Mode mode = Mode::plain;
    int eta_row = -1;    // "-eta <= 0" row (fv)
    int eta_coord = -1;  // coordinate index of eta (fv)
    // When present, a certificate only terminates the run once its
    // restriction to the original rows verifies against this system;
    // until then the run keeps iterating.
    std::optional<Problem> original;

    // components of a system certificate belonging to the original rows
    std::vector<double> restrict_to_original(std::span<const double> x) const;
};

struct SolveObservation {
    long iter;
    const EllipsoidState& state;
    const IterationRecord& rec;
    int phase;
};

struct SolverConfig {
    Algorithm algorithm = Algorithm::sea;
    long max_iterations = 0;  // 0: 200 n ln(n + m)
    double feas_eps = 1e-9;   // scaled by 1 + max|u|
    double cert_eps = 1e-8;
    double f_zero_eps = 1e-10;  // scaled by 1 + |v^T D v|
    double refactor_drift = 1e-7;
    long refactor_period = 500;
    int eta_dim = 0;  // 0: n for SEA, m for OEA
    std::uint64_t rng_seed = 0;
    BoundMode bound_mode = BoundMode::best;
    bool allow_decrease = true;
    double eta_eps = 1e-7;     // Freund-Vera eta positivity
    double weight_eps = 1e-6;  // ceiling for artificial-row weights at extraction
    double phase1_margin = 1e-7;
    bool collect_trace = false;
    std::string trace_path;
    std::function<void(const SolveObservation&)> observer;
};

long default_iteration_cap(int n, int m);

// Runs the chosen algorithm on the working system until a terminal outcome.
// Bounds in sys.bounds are improved in place. Errors never escape; they are
// surfaced as Status::numerical_failure.
Outcome run(WorkingSystem& sys, const SolverConfig& cfg, int phase = 0);

void write_trace_csv(const std::string& path, const std::vector<IterationRecord>& trace);

}  // namespace ellipsoid

#endif
