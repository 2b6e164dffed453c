#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "tilelab/density.hpp"
#include "tilelab/graph.hpp"
#include "tilelab/graph_io.hpp"
#include "tilelab/random_models.hpp"
#include "tilelab/tiling.hpp"

namespace tilelab {

struct SweepConfig {
    std::string pattern_spec = "k3";  // named pattern or file:PATH
    std::vector<int> n_values;
    BaseSpec base;
    std::vector<Rational> c_grid;
    int trials = 1;
    Seed seed;
    long long budget = 25'000;  // exact-solver nodes per trial
    int greedy_passes = 6;
    int workers = 0;  // trial-level parallelism; 0 = hardware concurrency
};

// The default grid is geometric; thresholds are multiplicative phenomena.
inline std::vector<Rational> default_c_grid() {
    return {Rational(1, 4), Rational(1, 2), Rational(1), Rational(2), Rational(4), Rational(8)};
}

struct SweepRow {
    int n = 0;
    Rational c;
    double p = 0.0;
    int trials = 0;
    int found = 0;
    int certified_no = 0;
    int unknown = 0;
    double mean_coverage = 0.0;
    double wall_time_ms = 0.0;

    bool operator==(const SweepRow& o) const {
        return n == o.n && c == o.c && p == o.p && trials == o.trials && found == o.found &&
               certified_no == o.certified_no && unknown == o.unknown &&
               mean_coverage == o.mean_coverage && wall_time_ms == o.wall_time_ms;
    }
};

struct SweepMetadata {
    std::uint64_t seed = 0;
    long long budget = 0;
    std::string pattern;
    std::string base;
    std::string version = "tilelab-1";
    std::string notes;

    bool operator==(const SweepMetadata& o) const {
        return seed == o.seed && budget == o.budget && pattern == o.pattern && base == o.base &&
               version == o.version && notes == o.notes;
    }
};

struct SweepResult {
    std::vector<SweepRow> rows;
    SweepMetadata metadata;

    bool operator==(const SweepResult& o) const {
        return rows == o.rows && metadata == o.metadata;
    }
};

inline Pattern load_pattern(const std::string& spec) {
    if (spec.rfind("file:", 0) == 0)
        return Pattern::from_graph(load_graph(spec.substr(5)));
    return Pattern::named(spec);
}

inline std::string describe_base(const BaseSpec& base) {
    switch (base.kind) {
        case BaseSpec::Kind::Empty: return "empty";
        case BaseSpec::Kind::Explicit: return "explicit";
        case BaseSpec::Kind::Extremal: return "extremal:" + to_string(base.a);
        case BaseSpec::Kind::MinDegree: return "mindeg:" + to_string(base.alpha);
    }
    return "?";
}

inline void validate_config(const SweepConfig& cfg, const Pattern& pattern) {
    if (cfg.trials < 1) throw std::invalid_argument("sweep config: trials must be >= 1");
    if (cfg.n_values.empty()) throw std::invalid_argument("sweep config: no n values");
    for (int n : cfg.n_values) {
        if (n < 3) throw std::invalid_argument("sweep config: n must be >= 3");
        if (n % pattern.size() != 0)
            throw std::invalid_argument("sweep config: n=" + std::to_string(n) +
                                        " is not divisible by |H|=" + std::to_string(pattern.size()));
    }
    if (cfg.c_grid.empty()) throw std::invalid_argument("sweep config: empty c grid");
    for (size_t i = 0; i + 1 < cfg.c_grid.size(); ++i)
        if (!(cfg.c_grid[i] < cfg.c_grid[i + 1]))
            throw std::invalid_argument("sweep config: c grid must be strictly increasing");
    for (const Rational& c : cfg.c_grid)
        if (c < Rational(0)) throw std::invalid_argument("sweep config: negative c");
    if (pattern.edge_count() < 1)
        throw std::invalid_argument("sweep config: template needs at least one edge");
}

struct TrialOutcome {
    TilingStatus status = TilingStatus::Unknown;
    double coverage = 0.0;           // best known covered fraction
    std::optional<Tiling> certificate;  // present iff status == Found
};

// Greedy first (cheap Found certificates), exact search only when greedy
// stalls. A certificate found at a smaller p transfers upward along the
// coupling: it is revalidated against the larger host before reuse.
inline TrialOutcome solve_trial(const Graph& host, const Pattern& pattern, long long budget,
                                int greedy_passes, const Seed& seed,
                                const Tiling* transfer_hint = nullptr) {
    TrialOutcome outcome;
    int n = host.vertex_count();
    if (transfer_hint && validate_perfect_tiling(host, pattern, *transfer_hint)) {
        outcome.status = TilingStatus::Found;
        outcome.coverage = 1.0;
        outcome.certificate = *transfer_hint;
        return outcome;
    }
    Tiling greedy = max_tiling_greedy(host, pattern, seed, greedy_passes);
    outcome.coverage = n == 0 ? 1.0 : static_cast<double>(greedy.covered.size()) / n;
    if (greedy.covered.size() == n) {
        outcome.status = TilingStatus::Found;
        outcome.certificate = std::move(greedy);
        return outcome;
    }
    TilingResult exact = perfect_tiling(host, pattern, budget);
    outcome.status = exact.status;
    if (exact.status == TilingStatus::Found) {
        outcome.coverage = 1.0;
        outcome.certificate = std::move(exact.tiling);
    }
    return outcome;
}

// Hook invoked once per completed trial cell, always on the caller's thread
// and in deterministic (trial, c) order; used by the demo/comparison wrappers.
using TrialHook = std::function<void(int n_index, int c_index, int trial, const PerturbedSample&,
                                     const TrialOutcome&)>;

namespace detail {

// Fan out fn(0..trials-1) across a small pool. Work items only touch their
// own slot, so scheduling cannot change results.
template <class Fn>
inline void parallel_trials(int trials, int workers, Fn&& fn) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, trials));
    if (workers == 1) {
        for (int t = 0; t < trials; ++t) fn(t);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
                try {
                    fn(t);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct TrialCell {
    TilingStatus status = TilingStatus::Unknown;
    double coverage = 0.0;
    double ms = 0.0;
    PerturbedSample sample;
};

}  // namespace detail

inline SweepResult run_threshold_sweep(const SweepConfig& cfg, const TrialHook& hook = {}) {
    Pattern pattern = load_pattern(cfg.pattern_spec);
    validate_config(cfg, pattern);
    double d_star = to_double(pattern.profile().d_star);
    SweepResult result;
    result.metadata.seed = cfg.seed.root;
    result.metadata.budget = cfg.budget;
    result.metadata.pattern = cfg.pattern_spec;
    result.metadata.base = describe_base(cfg.base);
    for (size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
        int n = cfg.n_values[ni];
        std::vector<double> p_of_c(cfg.c_grid.size());
        for (size_t ci = 0; ci < cfg.c_grid.size(); ++ci)
            p_of_c[ci] = std::min(1.0, to_double(cfg.c_grid[ci]) * std::pow(n, -1.0 / d_star));

        std::vector<std::vector<detail::TrialCell>> records(
            static_cast<size_t>(cfg.trials));
        detail::parallel_trials(cfg.trials, cfg.workers, [&](int trial) {
            Seed trial_seed =
                cfg.seed.derive(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial));
            Graph base = make_base(cfg.base, n, trial_seed.derive(0), &pattern);
            Seed edge_seed = trial_seed.derive(1);
            std::optional<Tiling> carried;  // certificate from a smaller c
            auto& cells = records[static_cast<size_t>(trial)];
            cells.resize(cfg.c_grid.size());
            for (size_t ci = 0; ci < cfg.c_grid.size(); ++ci) {
                auto t0 = std::chrono::steady_clock::now();
                detail::TrialCell& cell = cells[ci];
                cell.sample.base = base;
                cell.sample.perturbed = graph_union(base, sample_gnp(n, p_of_c[ci], edge_seed));
                TrialOutcome outcome =
                    solve_trial(cell.sample.perturbed, pattern, cfg.budget, cfg.greedy_passes,
                                trial_seed.derive(2, ci), carried ? &*carried : nullptr);
                if (outcome.certificate) carried = std::move(outcome.certificate);
                cell.status = outcome.status;
                cell.coverage = outcome.coverage;
                cell.ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
            }
        });

        // deterministic merge in (c, trial) order
        for (size_t ci = 0; ci < cfg.c_grid.size(); ++ci) {
            SweepRow row;
            row.n = n;
            row.c = cfg.c_grid[ci];
            row.p = p_of_c[ci];
            row.trials = cfg.trials;
            double coverage_sum = 0.0, elapsed = 0.0;
            for (int trial = 0; trial < cfg.trials; ++trial) {
                const auto& cell = records[static_cast<size_t>(trial)][ci];
                switch (cell.status) {
                    case TilingStatus::Found: ++row.found; break;
                    case TilingStatus::NoneExists: ++row.certified_no; break;
                    case TilingStatus::Unknown: ++row.unknown; break;
                }
                coverage_sum += cell.coverage;
                elapsed += cell.ms;
            }
            row.mean_coverage = coverage_sum / cfg.trials;
            row.wall_time_ms = elapsed;
            result.rows.push_back(row);
        }
        if (hook) {
            for (int trial = 0; trial < cfg.trials; ++trial)
                for (size_t ci = 0; ci < cfg.c_grid.size(); ++ci) {
                    const auto& cell = records[static_cast<size_t>(trial)][ci];
                    TrialOutcome outcome;
                    outcome.status = cell.status;
                    outcome.coverage = cell.coverage;
                    hook(static_cast<int>(ni), static_cast<int>(ci), trial, cell.sample, outcome);
                }
        }
    }
    return result;
}

struct ExtremalDemoRow {
    int n = 0;
    Rational c;
    double mean_class_y_coverage = 0.0;  // fraction of |Y| covered inside Y
    int trials_meeting_eps = 0;          // Y-internal coverage >= eps*n
};

struct ExtremalDemoResult {
    SweepResult sweep;
    Rational a;
    Rational b;
    Rational epsilon;  // b - a(|H|-1), the coverage bound the construction forces
    std::vector<ExtremalDemoRow> demo_rows;
};

// The construction's demonstration: a perfect tiling forces an H-tiling
// inside class Y covering at least eps*n vertices, so failures at small p are
// certified by measuring Y-internal coverage directly.
inline ExtremalDemoResult run_extremal_demo(const std::string& pattern_spec, int n,
                                            const Rational& a, const std::vector<Rational>& c_grid,
                                            int trials, const Seed& seed,
                                            long long budget = 25'000, int greedy_passes = 6,
                                            int workers = 0) {
    Pattern pattern = load_pattern(pattern_spec);
    ExtremalBase extremal = make_extremal_base(n, a, pattern);  // validates the constraint
    ExtremalDemoResult result;
    result.a = a;
    result.b = Rational(1) - a;
    result.epsilon = result.b - a * Rational(pattern.size() - 1);

    SweepConfig cfg;
    cfg.pattern_spec = pattern_spec;
    cfg.n_values = {n};
    cfg.base = BaseSpec::extremal(a, pattern.size());
    cfg.c_grid = c_grid;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.budget = budget;
    cfg.greedy_passes = greedy_passes;
    cfg.workers = workers;

    result.demo_rows.assign(c_grid.size(), ExtremalDemoRow{});
    std::vector<double> y_sum(c_grid.size(), 0.0);
    Rational eps_n = result.epsilon * Rational(n);
    auto hook = [&](int, int c_index, int trial, const PerturbedSample& sample,
                    const TrialOutcome&) {
        auto sub = induced(sample.perturbed, extremal.class_y);
        Tiling inside = max_tiling_greedy(sub.graph, pattern,
                                          seed.derive(0x9, static_cast<std::uint64_t>(trial)),
                                          greedy_passes);
        int covered = inside.covered.size();
        y_sum[static_cast<size_t>(c_index)] += extremal.class_y.size() == 0
                                                   ? 0.0
                                                   : static_cast<double>(covered) /
                                                         extremal.class_y.size();
        if (Rational(covered) >= eps_n)
            ++result.demo_rows[static_cast<size_t>(c_index)].trials_meeting_eps;
    };
    result.sweep = run_threshold_sweep(cfg, hook);
    for (size_t ci = 0; ci < c_grid.size(); ++ci) {
        result.demo_rows[ci].n = n;
        result.demo_rows[ci].c = c_grid[ci];
        result.demo_rows[ci].mean_class_y_coverage = y_sum[ci] / trials;
    }
    result.sweep.metadata.notes = "extremal demo: eps = " + to_string(result.epsilon);
    return result;
}

struct BaseComparisonResult {
    SweepResult empty_base;
    SweepResult dense_base;
    int coupling_violations = 0;  // empty-base Found without dense-base Found
};

// Identical c grid and shared random-edge streams against the empty base and
// the min-degree base. A certificate found on the empty host transfers to the
// dense host (superset of edges), so per-seed coupling dominance holds by
// construction and is still revalidated.
inline BaseComparisonResult run_base_comparison(const std::string& pattern_spec, int n,
                                                const Rational& alpha,
                                                const std::vector<Rational>& c_grid, int trials,
                                                const Seed& seed, long long budget = 25'000,
                                                int greedy_passes = 6, int workers = 0) {
    Pattern pattern = load_pattern(pattern_spec);
    SweepConfig cfg;
    cfg.pattern_spec = pattern_spec;
    cfg.n_values = {n};
    cfg.c_grid = c_grid;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.budget = budget;
    cfg.greedy_passes = greedy_passes;
    cfg.workers = workers;
    cfg.base = BaseSpec::empty();
    validate_config(cfg, pattern);

    double d_star = to_double(pattern.profile().d_star);
    BaseComparisonResult out;
    auto init_result = [&](const BaseSpec& base) {
        SweepResult r;
        r.metadata.seed = seed.root;
        r.metadata.budget = budget;
        r.metadata.pattern = pattern_spec;
        r.metadata.base = describe_base(base);
        r.rows.assign(c_grid.size(), SweepRow{});
        for (size_t ci = 0; ci < c_grid.size(); ++ci) {
            r.rows[ci].n = n;
            r.rows[ci].c = c_grid[ci];
            r.rows[ci].trials = trials;
        }
        return r;
    };
    out.empty_base = init_result(BaseSpec::empty());
    out.dense_base = init_result(BaseSpec::min_degree(alpha));
    std::vector<double> p_of_c(c_grid.size());
    for (size_t ci = 0; ci < c_grid.size(); ++ci) {
        p_of_c[ci] = std::min(1.0, to_double(c_grid[ci]) * std::pow(n, -1.0 / d_star));
        out.empty_base.rows[ci].p = p_of_c[ci];
        out.dense_base.rows[ci].p = p_of_c[ci];
    }

    struct PairedCell {
        detail::TrialCell empty;
        detail::TrialCell dense;
    };
    std::vector<std::vector<PairedCell>> records(static_cast<size_t>(trials));
    detail::parallel_trials(trials, cfg.workers, [&](int trial) {
        Seed trial_seed = seed.derive(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial));
        Graph dense = make_min_degree_base(n, alpha, trial_seed.derive(0));
        Seed edge_seed = trial_seed.derive(1);
        std::optional<Tiling> carried_empty, carried_dense;
        auto& cells = records[static_cast<size_t>(trial)];
        cells.resize(c_grid.size());
        for (size_t ci = 0; ci < c_grid.size(); ++ci) {
            Graph random_part = sample_gnp(n, p_of_c[ci], edge_seed);

            auto te0 = std::chrono::steady_clock::now();
            TrialOutcome empty_outcome =
                solve_trial(random_part, pattern, budget, greedy_passes,
                            trial_seed.derive(2, ci), carried_empty ? &*carried_empty : nullptr);
            cells[ci].empty.status = empty_outcome.status;
            cells[ci].empty.coverage = empty_outcome.coverage;
            cells[ci].empty.ms = std::chrono::duration<double, std::milli>(
                                     std::chrono::steady_clock::now() - te0)
                                     .count();

            auto td0 = std::chrono::steady_clock::now();
            Graph dense_host = graph_union(dense, random_part);
            const Tiling* hint = carried_dense ? &*carried_dense
                                 : empty_outcome.certificate ? &*empty_outcome.certificate
                                                             : nullptr;
            TrialOutcome dense_outcome = solve_trial(dense_host, pattern, budget, greedy_passes,
                                                     trial_seed.derive(3, ci), hint);
            cells[ci].dense.status = dense_outcome.status;
            cells[ci].dense.coverage = dense_outcome.coverage;
            cells[ci].dense.ms = std::chrono::duration<double, std::milli>(
                                     std::chrono::steady_clock::now() - td0)
                                     .count();
            if (empty_outcome.certificate) carried_empty = std::move(empty_outcome.certificate);
            if (dense_outcome.certificate) carried_dense = std::move(dense_outcome.certificate);
        }
    });

    for (size_t ci = 0; ci < c_grid.size(); ++ci) {
        auto tally = [](SweepRow& row, const detail::TrialCell& cell) {
            switch (cell.status) {
                case TilingStatus::Found: ++row.found; break;
                case TilingStatus::NoneExists: ++row.certified_no; break;
                case TilingStatus::Unknown: ++row.unknown; break;
            }
        };
        double cov_empty = 0.0, cov_dense = 0.0, ms_empty = 0.0, ms_dense = 0.0;
        for (int trial = 0; trial < trials; ++trial) {
            const PairedCell& cell = records[static_cast<size_t>(trial)][ci];
            tally(out.empty_base.rows[ci], cell.empty);
            tally(out.dense_base.rows[ci], cell.dense);
            cov_empty += cell.empty.coverage;
            cov_dense += cell.dense.coverage;
            ms_empty += cell.empty.ms;
            ms_dense += cell.dense.ms;
            if (cell.empty.status == TilingStatus::Found &&
                cell.dense.status != TilingStatus::Found)
                ++out.coupling_violations;
        }
        out.empty_base.rows[ci].mean_coverage = cov_empty / trials;
        out.dense_base.rows[ci].mean_coverage = cov_dense / trials;
        out.empty_base.rows[ci].wall_time_ms = ms_empty;
        out.dense_base.rows[ci].wall_time_ms = ms_dense;
    }
    out.empty_base.metadata.notes =
        "desk-scale comparison; the asymptotic logarithmic gap is not resolvable at these sizes";
    out.dense_base.metadata.notes = out.empty_base.metadata.notes;
    return out;
}

// --- emitters ---------------------------------------------------------------

// Exact decimal when the denominator is 2^a 5^b, otherwise "num/den".
inline std::string csv_rational(const Rational& r) {
    long long den = r.denominator();
    while (den % 2 == 0) den /= 2;
    while (den % 5 == 0) den /= 5;
    if (den != 1) return to_string(r);
    long long num = r.numerator(), d = r.denominator();
    long long whole = num / d;
    long long rem = std::llabs(num % d);
    if (rem == 0) return std::to_string(whole);
    std::string frac;
    while (rem != 0) {
        rem *= 10;
        frac.push_back(static_cast<char>('0' + rem / d));
        rem %= d;
    }
    std::string sign = (num < 0 && whole == 0) ? "-" : "";
    return sign + std::to_string(whole) + "." + frac;
}

inline std::string format_double(double x, const char* fmt = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, x);
    return buf;
}

inline std::string to_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "n,c,p,trials,found,certified_no,unknown,mean_coverage,wall_time_ms\n";
    for (const auto& row : result.rows) {
        out << row.n << "," << csv_rational(row.c) << "," << format_double(row.p) << ","
            << row.trials << "," << row.found << "," << row.certified_no << "," << row.unknown
            << "," << format_double(row.mean_coverage) << ","
            << format_double(row.wall_time_ms, "%.3f") << "\n";
    }
    return out.str();
}

inline nlohmann::json to_json(const SweepResult& result) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : result.rows) {
        rows.push_back({{"n", row.n},
                        {"c", to_string(row.c)},
                        {"p", row.p},
                        {"trials", row.trials},
                        {"found", row.found},
                        {"certified_no", row.certified_no},
                        {"unknown", row.unknown},
                        {"probability_lower", static_cast<double>(row.found) / row.trials},
                        {"probability_upper",
                         static_cast<double>(row.found + row.unknown) / row.trials},
                        {"mean_coverage", row.mean_coverage},
                        {"wall_time_ms", row.wall_time_ms}});
    }
    return {{"metadata",
             {{"seed", result.metadata.seed},
              {"budget", result.metadata.budget},
              {"pattern", result.metadata.pattern},
              {"base", result.metadata.base},
              {"version", result.metadata.version},
              {"notes", result.metadata.notes}}},
            {"rows", rows}};
}

inline SweepResult sweep_from_json(const nlohmann::json& j) {
    SweepResult result;
    const auto& m = j.at("metadata");
    result.metadata.seed = m.at("seed").get<std::uint64_t>();
    result.metadata.budget = m.at("budget").get<long long>();
    result.metadata.pattern = m.at("pattern").get<std::string>();
    result.metadata.base = m.at("base").get<std::string>();
    result.metadata.version = m.at("version").get<std::string>();
    result.metadata.notes = m.at("notes").get<std::string>();
    for (const auto& rj : j.at("rows")) {
        SweepRow row;
        row.n = rj.at("n").get<int>();
        row.c = parse_rational(rj.at("c").get<std::string>());
        row.p = rj.at("p").get<double>();
        row.trials = rj.at("trials").get<int>();
        row.found = rj.at("found").get<int>();
        row.certified_no = rj.at("certified_no").get<int>();
        row.unknown = rj.at("unknown").get<int>();
        row.mean_coverage = rj.at("mean_coverage").get<double>();
        row.wall_time_ms = rj.at("wall_time_ms").get<double>();
        result.rows.push_back(row);
    }
    return result;
}

enum class EmitFormat { Csv, Json };

inline void emit(const SweepResult& result, EmitFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    if (format == EmitFormat::Csv)
        out << to_csv(result);
    else
        out << to_json(result).dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace tilelab
