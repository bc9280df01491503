#include "ellipsoid/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "ellipsoid/errors.hpp"

namespace ellipsoid {

namespace {

struct Job {
    GenSpec gen;
    InitScheme init;
    Algorithm alg;
};

bool record_less(const RunRecord& a, const RunRecord& b) {
    return std::tie(a.n, a.m, a.klass, a.seed, a.init, a.alg) <
           std::tie(b.n, b.m, b.klass, b.seed, b.init, b.alg);
}

}  // namespace

std::string cert_filename(const RunRecord& rec) {
    std::ostringstream name;
    name << "cert_" << rec.n << '_' << rec.m << '_' << rec.klass << '_' << rec.seed << '_'
         << rec.init << '_' << rec.alg << ".txt";
    return name.str();
}

std::vector<RunRecord> run_suite(const SuiteSpec& spec) {
    std::vector<Job> jobs;
    for (int n : spec.ns)
        for (double ratio : spec.ratios)
            for (const std::string& klass : spec.classes)
                for (int s = 0; s < spec.seeds; ++s)
                    for (InitScheme init : spec.inits)
                        for (Algorithm alg : spec.algs) {
                            if (init == InitScheme::twophase && alg != Algorithm::sea) continue;
                            Job job;
                            job.gen.n = n;
                            job.gen.m = static_cast<int>(std::lround(n * ratio));
                            job.gen.feasible = klass == "feasible";
                            job.gen.seed = static_cast<std::uint64_t>(s);
                            job.init = init;
                            job.alg = alg;
                            jobs.push_back(job);
                        }

    std::vector<RunRecord> records(jobs.size());
    if (!spec.cert_dir.empty()) std::filesystem::create_directories(spec.cert_dir);

    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            const Job& job = jobs[k];
            RunRecord rec;
            rec.n = job.gen.n;
            rec.m = job.gen.m;
            rec.klass = job.gen.feasible ? "feasible" : "infeasible";
            rec.seed = job.gen.seed;
            rec.init = to_string(job.init);
            rec.alg = to_string(job.alg);
            try {
                const GeneratedInstance inst = generate(job.gen);
                SolverConfig cfg = spec.base;
                cfg.algorithm = job.alg;
                const Outcome out = solve(inst.prob, job.init, cfg, spec.big_m);
                rec.status = to_string(out.status);
                rec.iterations = out.stats.iterations;
                rec.drops = out.stats.drop_steps;
                rec.decreases = out.stats.decrease_steps;
                rec.refactorizations = out.stats.refactorizations;
                rec.runtime_ms = out.stats.runtime_ms;
                if (!spec.cert_dir.empty() && out.status == Status::infeasible_cert &&
                    out.cert_one_sided) {
                    write_vector_file(
                        (std::filesystem::path(spec.cert_dir) / cert_filename(rec)).string(),
                        out.cert_one_sided->x);
                }
            } catch (const std::exception&) {
                rec.status = "numfail";
            }
            records[k] = std::move(rec);
        }
    };

    int threads = spec.threads > 0 ? spec.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::sort(records.begin(), records.end(), record_less);
    if (!spec.out_csv.empty()) write_csv(spec.out_csv, records);
    return records;
}

void write_csv(const std::string& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open " + path);
    out << kCsvHeader << '\n';
    char buf[64];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.3f", r.runtime_ms);
        out << r.n << ',' << r.m << ',' << r.klass << ',' << r.seed << ',' << r.init << ','
            << r.alg << ',' << r.status << ',' << r.iterations << ',' << r.drops << ','
            << r.decreases << ',' << r.refactorizations << ',' << buf << '\n';
    }
}

std::vector<RunRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("empty csv");
    if (line != kCsvHeader) throw InvalidInput("unexpected csv header: " + line);
    std::vector<RunRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        RunRecord r;
        if (!(row >> r.n >> r.m >> r.klass >> r.seed >> r.init >> r.alg >> r.status >>
              r.iterations >> r.drops >> r.decreases >> r.refactorizations >> r.runtime_ms))
            throw InvalidInput("malformed csv row: " + line);
        records.push_back(std::move(r));
    }
    return records;
}

std::string format_mean_table(const std::vector<RunRecord>& records) {
    std::map<std::tuple<int, int, std::string, std::string>, std::pair<double, int>> cells;
    std::set<std::pair<std::string, std::string>> columns;
    for (const auto& r : records) {
        auto& cell = cells[{r.n, r.m, r.init, r.klass}];
        cell.first += static_cast<double>(r.iterations);
        cell.second += 1;
        columns.insert({r.init, r.klass});
    }
    std::ostringstream out;
    out << "   n     m";
    for (const auto& [init, klass] : columns) out << "  " << init << '/' << klass;
    out << '\n';
    std::set<std::pair<int, int>> sizes;
    for (const auto& [key, cell] : cells) sizes.insert({std::get<0>(key), std::get<1>(key)});
    char buf[64];
    for (const auto& [n, m] : sizes) {
        std::snprintf(buf, sizeof buf, "%4d  %4d", n, m);
        out << buf;
        for (const auto& [init, klass] : columns) {
            const auto it = cells.find({n, m, init, klass});
            if (it == cells.end()) {
                out << "  -";
            } else {
                std::snprintf(buf, sizeof buf, "  %10.1f", it->second.first / it->second.second);
                out << buf;
            }
        }
        out << '\n';
    }
    return out.str();
}

PowerFit fit_power_law(const std::vector<RunRecord>& records, char predictor) {
    if (predictor != 'n' && predictor != 'm') throw InvalidInput("predictor must be n or m");
    std::set<int> distinct;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    long count = 0;
    for (const auto& r : records) {
        if (r.iterations <= 0) continue;
        const int pred = predictor == 'n' ? r.n : r.m;
        distinct.insert(pred);
        const double x = std::log(static_cast<double>(pred));
        const double y = std::log(static_cast<double>(r.iterations));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (distinct.size() < 3) throw InsufficientData("need at least three distinct sizes");
    const double denom = count * sxx - sx * sx;
    PowerFit fit;
    fit.exponent = (count * sxy - sx * sy) / denom;
    fit.coefficient = std::exp((sy - fit.exponent * sx) / count);
    return fit;
}

}  // namespace ellipsoid
