#ifndef ELLIPSOID_HARNESS_HPP
#define ELLIPSOID_HARNESS_HPP

#include <string>
#include <vector>

#include "ellipsoid/generator.hpp"
#include "ellipsoid/init.hpp"
#include "ellipsoid/solver.hpp"

namespace ellipsoid {

struct RunRecord {
    int n = 0;
    int m = 0;
    std::string klass;  // feasible | infeasible
    std::uint64_t seed = 0;
    std::string init;
    std::string alg;
    std::string status;
    long iterations = 0;
    long drops = 0;
    long decreases = 0;
    long refactorizations = 0;
    double runtime_ms = 0.0;
};

inline constexpr const char* kCsvHeader =
    "n,m,class,seed,init,alg,status,iterations,drops,decreases,refactorizations,runtime_ms";

struct SuiteSpec {
    std::vector<int> ns = {30, 60, 125};
    std::vector<double> ratios = {1.4, 2.0, 2.8, 4.0};
    int seeds = 10;
    std::vector<std::string> classes = {"feasible", "infeasible"};
    std::vector<InitScheme> inits = {InitScheme::bigm};
    std::vector<Algorithm> algs = {Algorithm::sea};
    double big_m = 1e4;
    int threads = 0;  // 0: hardware concurrency
    std::string out_csv;
    std::string cert_dir;  // when set, certificates land here for re-verification
    SolverConfig base;
};

// One record per (instance, init, algorithm). Rows are sorted before any
// output, so results do not depend on scheduling. Per-run failures become
// status values; the suite itself never aborts.
std::vector<RunRecord> run_suite(const SuiteSpec& spec);

void write_csv(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_csv(const std::string& path);

// Per-cell mean iteration counts in a table layout (rows n x m, columns per
// class), printed for quick comparison against the reference numbers.
std::string format_mean_table(const std::vector<RunRecord>& records);

struct PowerFit {
    double coefficient = 0.0;
    double exponent = 0.0;
};

// Least squares of ln(iterations) on ln(predictor); predictor is 'n' or 'm'.
// InsufficientData unless three distinct predictor values are present.
PowerFit fit_power_law(const std::vector<RunRecord>& records, char predictor);

// Canonical certificate filename for a run, relative to cert_dir.
std::string cert_filename(const RunRecord& rec);

}  // namespace ellipsoid

#endif
