#include "sparsemoo/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "sparsemoo/rng.hpp"

namespace sparsemoo::cli {

namespace fs = std::filesystem;

namespace {

/// Runs body(0..count-1) on up to `threads` workers. Results must be written
/// by index so the outcome does not depend on scheduling; the exception of
/// the lowest failing index is rethrown.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& worker : pool) {
        worker.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

int resolve_starts(const std::optional<int>& requested, int n) {
    if (!requested) {
        return 2 * n;
    }
    if (*requested < 1) {
        throw UsageError("--n-starts must be at least 1");
    }
    return *requested;
}

std::optional<Clock::time_point> deadline_after(Clock::time_point start, double seconds) {
    if (seconds <= 0.0) {
        return std::nullopt;
    }
    return start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
}

bool past(const std::optional<Clock::time_point>& deadline) { return deadline && Clock::now() >= *deadline; }

bool row_less(const FrontRow& a, const FrontRow& b) {
    for (Eigen::Index j = 0; j < a.f.size(); ++j) {
        if (a.f(j) != b.f(j)) {
            return a.f(j) < b.f(j);
        }
    }
    const std::string sa = a.support ? a.support->to_string() : "";
    const std::string sb = b.support ? b.support->to_string() : "";
    return sa < sb;
}

Front finalize_front(Front front) {
    Front out = nondominated_subset(front);
    std::stable_sort(out.rows.begin(), out.rows.end(), row_less);
    return out;
}

nlohmann::json solver_json(const SolverConfig& cfg) {
    return {{"L", cfg.L},
            {"eps", cfg.eps},
            {"max_iter", cfg.max_iter},
            {"armijo",
             {{"alpha0", cfg.armijo.alpha0},
              {"delta", cfg.armijo.delta},
              {"gamma", cfg.armijo.gamma},
              {"max_backtracks", cfg.armijo.max_backtracks}}},
            {"penalty",
             {{"tau0", cfg.penalty.tau0},
              {"tau_growth", cfg.penalty.tau_growth},
              {"eps0", cfg.penalty.eps0},
              {"eps_shrink", cfg.penalty.eps_shrink},
              {"xy_tol", cfg.penalty.xy_tol},
              {"max_outer", cfg.penalty.max_outer},
              {"max_inner", cfg.penalty.max_inner}}},
            {"enumeration_cap", cfg.enumeration_cap}};
}

std::string crowding_name(CrowdingFilter c) {
    switch (c) {
        case CrowdingFilter::off: return "off";
        case CrowdingFilter::mean: return "mean";
        case CrowdingFilter::quantile: return "quantile";
    }
    return "mean";
}

CrowdingFilter parse_crowding(const std::string& name) {
    if (name == "off") return CrowdingFilter::off;
    if (name == "mean") return CrowdingFilter::mean;
    if (name == "quantile") return CrowdingFilter::quantile;
    throw UsageError("unknown crowding filter '" + name + "' (expected off, mean or quantile)");
}

}  // namespace

unsigned worker_count(unsigned requested) {
    unsigned count = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SPARSEMOO_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) {
            count = std::min(count, static_cast<unsigned>(cap));
        }
    }
    return std::max(1u, count);
}

SolverConfig solver_defaults(bool logistic) {
    return logistic ? SolverConfig::logistic_defaults() : SolverConfig::quadratic_defaults();
}

Box start_box(bool logistic) { return logistic ? Box{0.0, 1.0} : Box{-2.0, 2.0}; }

RunReport multistart_front(const MultiObjectiveProblem& problem, const SparseBudget& budget,
                           const SolveOptions& options) {
    options.solver.validate();
    const int n = budget.dimension();
    const auto t0 = Clock::now();
    const auto solve_deadline = deadline_after(t0, options.wallclock / 2.0);
    const auto refine_deadline = deadline_after(t0, options.wallclock);
    const unsigned threads = worker_count(options.threads);

    RunReport report;
    nlohmann::json& meta = report.meta;
    meta["strategy"] = to_string(options.strategy);
    meta["solver"] = solver_json(options.solver);
    meta["refine"] = options.refine;

    std::vector<std::optional<Vector>> points;
    nlohmann::json steps = nlohmann::json::array();
    if (options.strategy == InitStrategy::scalarized) {
        const std::vector<double> lambdas = scalarization_grid(n);
        for (Vector& p : scalarized_iht(problem, budget, lambdas, Vector::Zero(n), options.solver)) {
            points.emplace_back(std::move(p));
        }
        meta["lambdas"] = lambdas;
        meta["start"] = "origin";
    } else {
        const int n_starts = resolve_starts(options.n_starts, n);
        const std::vector<Vector> starts = sample_starts(n, n_starts, options.seed, options.box, budget);
        points.resize(starts.size());
        std::vector<nlohmann::json> counts(starts.size());
        parallel_for(starts.size(), threads, [&](std::size_t k) {
            if (k > 0 && past(solve_deadline)) {
                return;
            }
            switch (options.strategy) {
                case InitStrategy::moiht: {
                    auto r = moiht(problem, starts[k], budget, options.solver);
                    counts[k] = r.trace.steps();
                    points[k] = std::move(r.point);
                    break;
                }
                case InitStrategy::mospd: points[k] = mospd(problem, starts[k], budget, options.solver); break;
                case InitStrategy::mohyb: {
                    auto r = mohyb(problem, starts[k], budget, options.solver);
                    counts[k] = r.trace.steps();
                    points[k] = std::move(r.point);
                    break;
                }
                case InitStrategy::scalarized: break;
            }
        });
        for (auto& c : counts) {
            steps.push_back(std::move(c));
        }
        meta["n_starts"] = n_starts;
        meta["seed"] = options.seed;
        meta["start_streams"] = "start k uses stream k of the seed";
        meta["box"] = {options.box.lo, options.box.hi};
    }
    meta["solver_steps"] = steps;

    std::vector<std::optional<std::pair<Vector, int>>> refined(points.size());
    parallel_for(points.size(), threads, [&](std::size_t k) {
        if (!points[k]) {
            return;
        }
        if (!options.refine || past(refine_deadline)) {
            refined[k] = std::make_pair(*points[k], 0);
            return;
        }
        const MosdResult r = mosd(problem, *points[k], SupportSet::of(*points[k]), options.solver.eps, options.solver);
        refined[k] = std::make_pair(r.point, r.iterations);
    });

    Front raw;
    nlohmann::json refine_steps = nlohmann::json::array();
    std::size_t processed = 0;
    for (auto& item : refined) {
        if (!item) {
            refine_steps.push_back(nullptr);
            continue;
        }
        ++processed;
        refine_steps.push_back(item->second);
        Vector f = problem.evaluate(item->first);
        if (!f.allFinite()) {
            continue;
        }
        SupportSet support = SupportSet::of(item->first);
        raw.rows.push_back({std::move(f), std::move(item->first), std::move(support)});
    }
    meta["refine_steps"] = refine_steps;
    meta["points_processed"] = processed;
    report.front = finalize_front(std::move(raw));
    meta["front_size"] = report.front.size();
    if (options.wallclock > 0.0) {
        meta["wallclock_seconds"] = options.wallclock;
        meta["deterministic"] = false;
    }
    return report;
}

RunReport sfsd_front(const MultiObjectiveProblem& problem, const SparseBudget& budget, const FrontOptions& options) {
    options.solver.validate();
    const auto t0 = Clock::now();
    InitOptions init;
    init.strategy = options.init;
    init.n_starts = options.init == InitStrategy::scalarized ? 1 : resolve_starts(options.n_starts, budget.dimension());
    init.seed = options.seed;
    init.box = options.box;
    init.solver = options.solver;
    init.deadline = deadline_after(t0, options.wallclock / 2.0);
    const ParetoArchive seeds = initialize(problem, budget, init);

    RunReport report;
    nlohmann::json& meta = report.meta;
    meta["init"] = to_string(options.init);
    meta["n_starts"] = init.n_starts;
    meta["seed"] = options.seed;
    meta["box"] = {options.box.lo, options.box.hi};
    meta["solver"] = solver_json(options.solver);
    meta["sfsd"] = {{"budget", options.sfsd.budget},
                    {"crowding", crowding_name(options.sfsd.crowding)},
                    {"crowding_quantile", options.sfsd.crowding_quantile},
                    {"stop_when_unchanged", options.sfsd.stop_when_unchanged},
                    {"final_polish", options.sfsd.final_polish},
                    {"final_eps", options.sfsd.final_eps}};
    meta["initial_archive"] = seeds.size();
    if (seeds.empty()) {
        meta["front_size"] = 0;
        return report;
    }

    SfsdConfig cfg = options.sfsd;
    cfg.armijo = options.solver.armijo;
    cfg.deadline = deadline_after(t0, options.wallclock);
    SfsdStats stats;
    const ParetoArchive archive = sfsd_run(problem, seeds, budget, cfg, &stats);
    meta["final_archive"] = archive.size();
    meta["support_keys"] = archive.groups().size();
    meta["sweeps"] = stats.sweeps;
    meta["common_steps"] = stats.common_steps;
    meta["partial_insertions"] = stats.partial_insertions;

    Front raw;
    for (const ArchiveEntry& e : archive.entries()) {
        raw.rows.push_back({e.fvals, e.x, e.J});
    }
    report.front = finalize_front(std::move(raw));
    meta["front_size"] = report.front.size();
    if (options.wallclock > 0.0) {
        meta["wallclock_seconds"] = options.wallclock;
        meta["deterministic"] = false;
    }
    return report;
}

std::vector<MetricRow> compute_metrics(const std::string& problem,
                                       const std::vector<std::pair<std::string, Front>>& fronts, bool logistic,
                                       const std::optional<Front>& reference, const std::optional<Vector>& hv_ref,
                                       nlohmann::json* meta) {
    int m = 0;
    const auto check = [&](const Front& f, const std::string& name) {
        for (const FrontRow& row : f.rows) {
            if (m == 0) {
                m = static_cast<int>(row.f.size());
            } else if (row.f.size() != m) {
                throw DataError("front '" + name + "' has a different number of objectives");
            }
        }
    };
    for (const auto& [name, f] : fronts) {
        check(f, name);
    }
    if (reference) {
        check(*reference, "reference");
    }
    if (m != 2) {
        throw DataError(m == 0 ? "all fronts are empty" : "metrics need exactly two objectives");
    }

    std::vector<Front> all;
    for (const auto& item : fronts) {
        all.push_back(item.second);
    }
    const Front ref = reference ? nondominated_subset(*reference) : build_reference_front(all);
    if (ref.empty()) {
        throw DataError("reference front is empty");
    }
    const Vector hv_point = hv_ref ? *hv_ref : default_hypervolume_reference({ref});

    // Spreads are evaluated on rescaled copies in logistic mode.
    std::vector<Front> spread_fronts = all;
    Front spread_ref = ref;
    if (logistic) {
        std::vector<Front*> ptrs{&spread_ref};
        for (Front& f : spread_fronts) {
            ptrs.push_back(&f);
        }
        rescale_for_spread(ptrs);
    }

    std::vector<MetricRow> rows;
    for (std::size_t k = 0; k < fronts.size(); ++k) {
        MetricRow row;
        row.problem = problem;
        row.solver = fronts[k].first;
        row.purity = purity(all[k], ref);
        row.gamma_spread = gamma_spread(spread_fronts[k], spread_ref);
        row.delta_spread = delta_spread(spread_fronts[k], spread_ref);
        row.hypervolume = hypervolume_2d(all[k], hv_point);
        rows.push_back(std::move(row));
    }
    if (meta) {
        (*meta)["reference_size"] = ref.size();
        (*meta)["reference_source"] = reference ? "file" : "union of the given fronts";
        (*meta)["hypervolume_reference"] = {hv_point(0), hv_point(1)};
        (*meta)["hypervolume_reference_rule"] =
            hv_ref ? "user supplied" : "max + 0.1 * max(|max|, max - min) over the reference front";
        (*meta)["spread_space"] = logistic ? "log10 f2, min-max rescaled" : "raw objectives";
    }
    return rows;
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
    std::ostringstream out;
    out << "problem,solver";
    for (const auto& name : kMetricNames) {
        out << ',' << name;
    }
    out << '\n';
    for (const MetricRow& r : rows) {
        out << r.problem << ',' << r.solver << ',' << format_double(r.purity) << ',' << format_double(r.gamma_spread)
            << ',' << format_double(r.delta_spread) << ',' << format_double(r.hypervolume) << '\n';
    }
    return out.str();
}

namespace {

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') {
            cell.pop_back();
        }
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t row, std::size_t col) {
    if (cell.empty() || cell == "nan") {
        return std::nan("");
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw DataError(path + ": non-numeric cell '" + cell + "' at row " + std::to_string(row) + ", column " +
                        std::to_string(col + 1));
    }
    return v;
}

void require_plain_name(const std::string& name, const char* what) {
    if (name.empty() || name.find_first_of(",\n\r") != std::string::npos) {
        throw UsageError(std::string(what) + " '" + name + "' must be nonempty and free of commas");
    }
}

}  // namespace

std::vector<MetricRow> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path + ": missing header");
    }
    const std::vector<std::string> header = split_cells(line);
    const auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw DataError(path + ": missing column '" + name + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_problem = column("problem"), c_solver = column("solver");
    std::vector<std::size_t> c_metric;
    for (const auto& name : kMetricNames) {
        c_metric.push_back(column(name));
    }
    std::vector<MetricRow> rows;
    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (line.empty() || line == "\r") {
            continue;
        }
        const std::vector<std::string> cells = split_cells(line);
        if (cells.size() != header.size()) {
            throw DataError(path + ": row " + std::to_string(row_number) + " has the wrong number of cells");
        }
        MetricRow r;
        r.problem = cells[c_problem];
        r.solver = cells[c_solver];
        r.purity = parse_cell(cells[c_metric[0]], path, row_number, c_metric[0]);
        r.gamma_spread = parse_cell(cells[c_metric[1]], path, row_number, c_metric[1]);
        r.delta_spread = parse_cell(cells[c_metric[2]], path, row_number, c_metric[2]);
        r.hypervolume = parse_cell(cells[c_metric[3]], path, row_number, c_metric[3]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::map<std::string, ProfileSet> profiles_from_rows(const std::vector<MetricRow>& rows) {
    std::vector<std::string> problems, solvers;
    const auto index_of = [](std::vector<std::string>& list, const std::string& key) {
        const auto it = std::find(list.begin(), list.end(), key);
        if (it != list.end()) {
            return static_cast<Eigen::Index>(it - list.begin());
        }
        list.push_back(key);
        return static_cast<Eigen::Index>(list.size() - 1);
    };
    std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
    std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
    for (const MetricRow& r : rows) {
        const auto cell = std::make_pair(index_of(problems, r.problem), index_of(solvers, r.solver));
        if (!seen.insert(cell).second) {
            throw DataError("duplicate metric row for problem '" + r.problem + "' and solver '" + r.solver + "'");
        }
        cells.push_back(cell);
    }
    std::map<std::string, ProfileSet> out;
    for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
        const bool higher_is_better = metric == 0 || metric == 3;
        Matrix values = Matrix::Constant(static_cast<Eigen::Index>(problems.size()),
                                         static_cast<Eigen::Index>(solvers.size()), std::nan(""));
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const MetricRow& r = rows[k];
            double v = metric == 0 ? r.purity : metric == 1 ? r.gamma_spread : metric == 2 ? r.delta_spread
                                                                                            : r.hypervolume;
            if (!higher_is_better && v == 0.0) {
                v = kProfileZeroFloor;
            }
            values(cells[k].first, cells[k].second) = v;
        }
        ProfileSet set;
        set.solvers = solvers;
        set.curves = performance_profiles(values, higher_is_better);
        out[kMetricNames[metric]] = std::move(set);
    }
    return out;
}

std::string profile_csv(const ProfileSet& set) {
    std::ostringstream out;
    out << "solver,tau,rho\n";
    for (std::size_t s = 0; s < set.solvers.size(); ++s) {
        const ProfileCurve& c = set.curves[s];
        for (std::size_t k = 0; k < c.tau.size(); ++k) {
            out << set.solvers[s] << ',' << format_double(c.tau[k]) << ',' << format_double(c.rho[k]) << '\n';
        }
    }
    return out.str();
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw DataError("write failed for '" + path.string() + "'");
    }
}

void write_meta(const fs::path& path, const nlohmann::json& meta) { write_text(path, meta.dump(2) + "\n"); }

std::string default_meta_path(const std::string& out) { return out + ".json"; }

int budget_s(int override_s, int instance_s) {
    const int s = override_s > 0 ? override_s : instance_s;
    if (s <= 0) {
        throw UsageError("the instance does not define s; pass --s");
    }
    return s;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    int n = 10;
    double kappa = 1.0;
    int s = 2;
    std::uint64_t seed = 0;
    std::string out;
    bool example = false;
    bool benchmark_grid = false;
    std::string out_dir;
};

struct GridSpec {
    int n;
    std::vector<int> s_values;
};

const std::vector<GridSpec> kBenchmarkGrid{{10, {2, 5, 8}}, {25, {5, 10, 20}}, {50, {5, 15, 30}}};
const std::vector<double> kBenchmarkKappas{1.0, 10.0, 100.0};

std::string grid_name(int n, double kappa, int s, std::uint64_t seed) {
    return "quad_n" + std::to_string(n) + "_k" + format_double(kappa) + "_s" + std::to_string(s) + "_seed" +
           std::to_string(seed) + ".json";
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    if (a.benchmark_grid) {
        if (a.out_dir.empty()) {
            throw UsageError("--benchmark-grid needs --out-dir");
        }
        fs::create_directories(a.out_dir);
        int count = 0;
        for (const GridSpec& spec : kBenchmarkGrid) {
            for (double kappa : kBenchmarkKappas) {
                for (int s : spec.s_values) {
                    for (std::uint64_t seed = a.seed; seed < a.seed + 3; ++seed) {
                        const auto inst = generate_quadratic(spec.n, kappa, seed, s);
                        write_json((fs::path(a.out_dir) / grid_name(spec.n, kappa, s, seed)).string(),
                                   quadratic_to_json(inst));
                        ++count;
                    }
                }
            }
        }
        out << "wrote " << count << " instances to " << a.out_dir << "\n";
        return kExitOk;
    }
    if (a.out.empty()) {
        throw UsageError("--out is required");
    }
    QuadraticInstance inst;
    if (a.example) {
        inst = example_problem();
    } else {
        SparseBudget(a.s, a.n);
        inst = generate_quadratic(a.n, a.kappa, a.seed, a.s);
    }
    write_json(a.out, quadratic_to_json(inst));
    out << "wrote " << a.out << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------- solve

struct SolverArgs {
    int s = 0;
    int max_iter = 10000;
    double L = 0.0;
    double eps = kDefaultStationarityTol;
    std::optional<double> tau0;
    std::optional<int> n_starts;
    std::uint64_t seed = 0;
    double wallclock = 0.0;
    std::string out;
    std::string meta;
};

SolverConfig configure(const SolverArgs& a, bool logistic) {
    SolverConfig cfg = solver_defaults(logistic);
    cfg.max_iter = a.max_iter;
    cfg.L = a.L;
    cfg.eps = a.eps;
    if (a.tau0) {
        cfg.penalty.tau0 = *a.tau0;
    }
    cfg.validate();
    return cfg;
}

void wallclock_warning(double wallclock, std::ostream& err) {
    if (wallclock > 0.0) {
        err << "note: wall-clock limits make runs non-deterministic\n";
    }
}

struct SolveArgs : SolverArgs {
    std::string instance;
    std::string strategy = "mohyb";
    bool no_refine = false;
    unsigned threads = 0;
};

int finish_front(const RunReport& report, nlohmann::json meta, const std::string& out_path,
                 const std::string& meta_path, std::ostream& out, std::ostream& err) {
    if (report.front.empty()) {
        err << "error: empty result, no points were produced\n";
        return kExitEmpty;
    }
    write_front_csv(out_path, report.front);
    write_meta(meta_path.empty() ? default_meta_path(out_path) : meta_path, meta);
    out << "wrote " << report.front.size() << " rows to " << out_path << "\n";
    return kExitOk;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    const LoadedInstance inst = load_instance(a.instance);
    const SparseBudget budget(budget_s(a.s, inst.s), inst.problem->dimension());
    SolveOptions options;
    options.strategy = parse_strategy(a.strategy);
    options.n_starts = a.n_starts;
    options.seed = a.seed;
    options.box = start_box(inst.logistic);
    options.solver = configure(a, inst.logistic);
    options.refine = !a.no_refine;
    options.wallclock = a.wallclock;
    options.threads = a.threads;
    wallclock_warning(a.wallclock, err);
    const RunReport report = multistart_front(*inst.problem, budget, options);
    nlohmann::json meta = report.meta;
    meta["command"] = "solve";
    meta["instance"] = inst.description;
    meta["instance_path"] = a.instance;
    meta["s"] = budget.s();
    return finish_front(report, meta, a.out, a.meta, out, err);
}

// ------------------------------------------------------------------- front

struct FrontArgs : SolverArgs {
    std::string instance;
    std::string init = "mohyb";
    int budget = 20;
    std::string crowding = "mean";
};

int cmd_front(const FrontArgs& a, std::ostream& out, std::ostream& err) {
    const LoadedInstance inst = load_instance(a.instance);
    const SparseBudget budget(budget_s(a.s, inst.s), inst.problem->dimension());
    if (a.budget < 0) {
        throw UsageError("--budget must be nonnegative");
    }
    FrontOptions options;
    options.init = parse_strategy(a.init);
    options.n_starts = a.n_starts;
    options.seed = a.seed;
    options.box = start_box(inst.logistic);
    options.solver = configure(a, inst.logistic);
    options.sfsd.budget = a.budget;
    options.sfsd.crowding = parse_crowding(a.crowding);
    options.wallclock = a.wallclock;
    wallclock_warning(a.wallclock, err);
    const RunReport report = sfsd_front(*inst.problem, budget, options);
    nlohmann::json meta = report.meta;
    meta["command"] = "front";
    meta["instance"] = inst.description;
    meta["instance_path"] = a.instance;
    meta["s"] = budget.s();
    return finish_front(report, meta, a.out, a.meta, out, err);
}

// ----------------------------------------------------------------- metrics

struct MetricsArgs {
    std::vector<std::string> fronts;
    std::string problem = "instance";
    std::string reference;
    bool logistic = false;
    std::vector<double> hv_ref;
    std::string out;
    std::string meta;
};

std::pair<std::string, std::string> named_path(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
        return {fs::path(spec).stem().string(), spec};
    }
    return {spec.substr(0, eq), spec.substr(eq + 1)};
}

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
    require_plain_name(a.problem, "problem name");
    std::vector<std::pair<std::string, Front>> fronts;
    std::set<std::string> names;
    for (const auto& spec : a.fronts) {
        auto [name, path] = named_path(spec);
        require_plain_name(name, "front name");
        if (!names.insert(name).second) {
            throw UsageError("duplicate front name '" + name + "'");
        }
        fronts.emplace_back(name, read_front_csv(path));
    }
    std::optional<Front> reference;
    if (!a.reference.empty()) {
        reference = read_front_csv(a.reference);
    }
    std::optional<Vector> hv;
    if (!a.hv_ref.empty()) {
        if (a.hv_ref.size() != 2) {
            throw UsageError("--hv-ref needs two values");
        }
        hv = Vector(2);
        (*hv) << a.hv_ref[0], a.hv_ref[1];
    }
    nlohmann::json meta;
    const auto rows = compute_metrics(a.problem, fronts, a.logistic, reference, hv, &meta);
    meta["command"] = "metrics";
    meta["fronts"] = a.fronts;
    write_text(a.out, metrics_csv(rows));
    write_meta(a.meta.empty() ? default_meta_path(a.out) : a.meta, meta);
    out << metrics_csv(rows);
    return kExitOk;
}

// ---------------------------------------------------------------- profiles

struct ProfilesArgs {
    std::vector<std::string> tables;
    std::string out_dir;
};

void write_profiles(const std::map<std::string, ProfileSet>& sets, const fs::path& dir) {
    for (const auto& [metric, set] : sets) {
        write_text(dir / ("profile_" + metric + ".csv"), profile_csv(set));
    }
}

nlohmann::json profile_meta() {
    return {{"higher_is_better", {"purity", "hypervolume"}},
            {"inversion", "higher-is-better values v are profiled as 1/v; zero counts as failure"},
            {"zero_floor", kProfileZeroFloor},
            {"zero_floor_rule", "zero gamma/delta spreads are raised to zero_floor"},
            {"failures", "missing, NaN or infinite values never count as solved"}};
}

int cmd_profiles(const ProfilesArgs& a, std::ostream& out) {
    std::vector<MetricRow> rows;
    for (const auto& path : a.tables) {
        const auto part = read_metrics_csv(path);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    const auto sets = profiles_from_rows(rows);
    write_profiles(sets, a.out_dir);
    nlohmann::json meta = profile_meta();
    meta["command"] = "profiles";
    meta["tables"] = a.tables;
    write_meta(fs::path(a.out_dir) / "profiles.json", meta);
    out << "wrote " << sets.size() << " profile files to " << a.out_dir << "\n";
    return kExitOk;
}

// --------------------------------------------------------------- reproduce

struct ReproduceArgs {
    std::string manifest;
    std::string out_dir;
    unsigned threads = 0;
    double wallclock = 0.0;
};

struct ManifestInstance {
    std::string name;
    std::unique_ptr<MultiObjectiveProblem> problem;
    int s = 0;
    bool logistic = false;
    nlohmann::json description;
};

struct ManifestSolver {
    std::string name;
    bool sfsd = false;
    InitStrategy strategy = InitStrategy::mohyb;
    std::optional<double> tau0;
    std::string crowding = "mean";
};

struct Task {
    std::size_t instance;
    std::size_t solver;
    std::optional<std::uint64_t> seed;  ///< unset for deterministic single runs
    std::uint64_t stream_seed = 0;
};

std::string require_string(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw DataError(where + ": missing string field '" + key + "'");
    }
    return j.at(key).get<std::string>();
}

std::vector<ManifestInstance> load_manifest_instances(const nlohmann::json& list, const fs::path& base) {
    if (!list.is_array() || list.empty()) {
        throw DataError("manifest: 'instances' must be a nonempty array");
    }
    // Every referenced file must exist before any work starts.
    for (const auto& item : list) {
        if (item.contains("path")) {
            const fs::path p = base / item.at("path").get<std::string>();
            if (!fs::exists(p)) {
                throw DataError("manifest: instance file '" + p.string() + "' does not exist");
            }
        }
    }
    std::vector<ManifestInstance> out;
    std::set<std::string> names;
    for (const auto& item : list) {
        ManifestInstance mi;
        mi.name = require_string(item, "name", "manifest instance");
        require_plain_name(mi.name, "instance name");
        if (mi.name.find('/') != std::string::npos || !names.insert(mi.name).second) {
            throw DataError("manifest: instance names must be unique and contain no '/'");
        }
        try {
            if (item.contains("path")) {
                LoadedInstance li = load_instance((base / item.at("path").get<std::string>()).string());
                mi.problem = std::move(li.problem);
                mi.s = li.s;
                mi.logistic = li.logistic;
                mi.description = li.description;
            } else if (item.value("example", false)) {
                const QuadraticInstance q = example_problem();
                mi.problem = std::make_unique<QuadraticProblem>(q.problem());
                mi.s = q.s;
                mi.description = {{"type", "quadratic"}, {"example", true}};
            } else if (item.contains("generate")) {
                const auto& g = item.at("generate");
                const QuadraticInstance q = generate_quadratic(g.at("n").get<int>(), g.at("kappa").get<double>(),
                                                               g.at("seed").get<std::uint64_t>(), g.at("s").get<int>());
                mi.problem = std::make_unique<QuadraticProblem>(q.problem());
                mi.s = q.s;
                mi.description = {{"type", "quadratic"}, {"n", q.n}, {"kappa", q.kappa}, {"seed", q.seed}, {"s", q.s}};
            } else {
                throw DataError("manifest: instance '" + mi.name + "' needs 'path', 'example' or 'generate'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw DataError("manifest: instance '" + mi.name + "': " + e.what());
        }
        if (item.contains("s")) {
            mi.s = item.at("s").get<int>();
        }
        if (mi.s <= 0) {
            throw DataError("manifest: instance '" + mi.name + "' does not define s");
        }
        out.push_back(std::move(mi));
    }
    return out;
}

std::vector<ManifestSolver> load_manifest_solvers(const nlohmann::json& list) {
    if (!list.is_array() || list.empty()) {
        throw DataError("manifest: 'solvers' must be a nonempty array");
    }
    std::vector<ManifestSolver> out;
    std::set<std::string> names;
    for (const auto& item : list) {
        ManifestSolver ms;
        ms.name = require_string(item, "name", "manifest solver");
        require_plain_name(ms.name, "solver name");
        if (ms.name.find('/') != std::string::npos || !names.insert(ms.name).second) {
            throw DataError("manifest: solver names must be unique and contain no '/'");
        }
        const std::string command = require_string(item, "command", "manifest solver '" + ms.name + "'");
        if (command != "solve" && command != "front") {
            throw DataError("manifest: solver '" + ms.name + "' command must be 'solve' or 'front'");
        }
        ms.sfsd = command == "front";
        ms.strategy = parse_strategy(item.value(ms.sfsd ? "init" : "strategy", std::string("mohyb")));
        if (item.contains("tau0")) {
            ms.tau0 = item.at("tau0").get<double>();
        }
        ms.crowding = item.value("crowding", std::string("mean"));
        parse_crowding(ms.crowding);
        out.push_back(std::move(ms));
    }
    return out;
}

int cmd_reproduce(const ReproduceArgs& a, std::ostream& out, std::ostream& err) {
    const nlohmann::json manifest = read_json(a.manifest);
    const fs::path base = fs::path(a.manifest).parent_path();
    std::vector<ManifestInstance> instances;
    std::vector<ManifestSolver> solvers;
    std::vector<std::uint64_t> seeds;
    std::uint64_t master_seed = 0;
    int max_iter = 10000;
    int sweeps = 20;
    std::optional<int> n_starts;
    fs::path out_dir;
    try {
        instances = load_manifest_instances(manifest.at("instances"), base);
        solvers = load_manifest_solvers(manifest.at("solvers"));
        seeds = manifest.value("seeds", std::vector<std::uint64_t>{0});
        if (seeds.empty()) {
            throw DataError("manifest: 'seeds' must not be empty");
        }
        master_seed = manifest.value("seed", std::uint64_t{0});
        const nlohmann::json budgets = manifest.value("budgets", nlohmann::json::object());
        max_iter = budgets.value("max_iter", max_iter);
        sweeps = budgets.value("sfsd_sweeps", sweeps);
        if (manifest.contains("n_starts") && !manifest.at("n_starts").is_null()) {
            n_starts = manifest.at("n_starts").get<int>();
        }
        out_dir = !a.out_dir.empty() ? fs::path(a.out_dir) : base / manifest.value("out_dir", std::string("results"));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(a.manifest + ": " + e.what());
    }
    wallclock_warning(a.wallclock, err);

    // Scalarized phase one starts at the origin, so those solvers run once.
    std::vector<Task> tasks;
    const Rng master(master_seed);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        for (std::size_t j = 0; j < solvers.size(); ++j) {
            const bool seeded = solvers[j].strategy != InitStrategy::scalarized;
            if (!seeded) {
                tasks.push_back({i, j, std::nullopt, 0});
                continue;
            }
            for (std::uint64_t seed : seeds) {
                const std::uint64_t stream = master.split(i).split(j).split(seed).seed();
                tasks.push_back({i, j, seed, stream});
            }
        }
    }

    std::vector<RunReport> reports(tasks.size());
    parallel_for(tasks.size(), worker_count(a.threads), [&](std::size_t k) {
        const Task& t = tasks[k];
        const ManifestInstance& inst = instances[t.instance];
        const ManifestSolver& sol = solvers[t.solver];
        const SparseBudget budget(inst.s, inst.problem->dimension());
        SolverConfig cfg = solver_defaults(inst.logistic);
        cfg.max_iter = max_iter;
        if (sol.tau0) {
            cfg.penalty.tau0 = *sol.tau0;
        }
        if (sol.sfsd) {
            FrontOptions o;
            o.init = sol.strategy;
            o.n_starts = n_starts;
            o.seed = t.stream_seed;
            o.box = start_box(inst.logistic);
            o.solver = cfg;
            o.sfsd.budget = sweeps;
            o.sfsd.crowding = parse_crowding(sol.crowding);
            o.wallclock = a.wallclock;
            reports[k] = sfsd_front(*inst.problem, budget, o);
        } else {
            SolveOptions o;
            o.strategy = sol.strategy;
            o.n_starts = n_starts;
            o.seed = t.stream_seed;
            o.box = start_box(inst.logistic);
            o.solver = cfg;
            o.wallclock = a.wallclock;
            o.threads = 1;
            reports[k] = multistart_front(*inst.problem, budget, o);
        }
    });

    fs::create_directories(out_dir / "fronts");
    nlohmann::json meta;
    meta["command"] = "reproduce";
    meta["manifest"] = manifest;
    meta["profiles"] = profile_meta();
    meta["reference_front_note"] =
        "reference fronts combine every run of every solver on an instance; with few seeds they are sparser than "
        "references built from many runs";
    if (a.wallclock > 0.0) {
        meta["wallclock_seconds"] = a.wallclock;
        meta["deterministic"] = false;
    }

    const auto run_label = [&](const Task& t) {
        std::string label = instances[t.instance].name + "__" + solvers[t.solver].name;
        if (t.seed) {
            label += "__seed" + std::to_string(*t.seed);
        }
        return label;
    };
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        write_front_csv((out_dir / "fronts" / (run_label(tasks[k]) + ".csv")).string(), reports[k].front);
    }

    std::vector<MetricRow> all_rows;
    nlohmann::json per_instance = nlohmann::json::object();
    for (std::size_t i = 0; i < instances.size(); ++i) {
        std::vector<Front> runs;
        for (std::size_t k = 0; k < tasks.size(); ++k) {
            if (tasks[k].instance == i) {
                runs.push_back(reports[k].front);
            }
        }
        const Front reference = build_reference_front(runs);
        nlohmann::json info;
        info["reference_size"] = reference.size();
        info["description"] = instances[i].description;
        if (reference.empty()) {
            err << "warning: instance '" << instances[i].name << "' produced no points\n";
            per_instance[instances[i].name] = info;
            continue;
        }
        // Best and worst seeds by purity against the combined reference.
        std::vector<std::pair<std::string, Front>> chosen;
        nlohmann::json selection = nlohmann::json::object();
        for (std::size_t j = 0; j < solvers.size(); ++j) {
            std::vector<std::size_t> mine;
            for (std::size_t k = 0; k < tasks.size(); ++k) {
                if (tasks[k].instance == i && tasks[k].solver == j) {
                    mine.push_back(k);
                }
            }
            if (mine.size() == 1) {
                chosen.emplace_back(solvers[j].name, reports[mine[0]].front);
                continue;
            }
            std::size_t best = mine[0], worst = mine[0];
            double best_p = -1.0, worst_p = 2.0;
            nlohmann::json purities = nlohmann::json::object();
            for (std::size_t k : mine) {
                const double p = purity(reports[k].front, reference);
                purities[std::to_string(*tasks[k].seed)] = p;
                if (p > best_p) {
                    best_p = p;
                    best = k;
                }
                if (p < worst_p) {
                    worst_p = p;
                    worst = k;
                }
            }
            chosen.emplace_back(solvers[j].name + "-best", reports[best].front);
            chosen.emplace_back(solvers[j].name + "-worst", reports[worst].front);
            selection[solvers[j].name] = {
                {"purity_by_seed", purities}, {"best_seed", *tasks[best].seed}, {"worst_seed", *tasks[worst].seed}};
        }
        nlohmann::json metric_meta;
        const auto rows =
            compute_metrics(instances[i].name, chosen, instances[i].logistic, reference, std::nullopt, &metric_meta);
        all_rows.insert(all_rows.end(), rows.begin(), rows.end());
        info["metrics"] = metric_meta;
        info["selection"] = selection;
        per_instance[instances[i].name] = info;
        write_front_csv((out_dir / "fronts" / (instances[i].name + "__reference.csv")).string(), reference);
    }
    meta["instances"] = per_instance;
    meta["runs"] = nlohmann::json::array();
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        nlohmann::json r = reports[k].meta;
        r["label"] = run_label(tasks[k]);
        meta["runs"].push_back(std::move(r));
    }
    write_text(out_dir / "metrics.csv", metrics_csv(all_rows));
    if (!all_rows.empty()) {
        write_profiles(profiles_from_rows(all_rows), out_dir);
    }
    write_meta(out_dir / "metadata.json", meta);
    out << "ran " << tasks.size() << " solver runs on " << instances.size() << " instances; results in "
        << out_dir.string() << "\n";
    return kExitOk;
}

void add_solver_flags(CLI::App* cmd, SolverArgs& a) {
    cmd->add_option("--s", a.s, "Sparsity bound (0 = take it from the instance)");
    cmd->add_option("--max-iter", a.max_iter, "Iteration budget of each single-point solver")->check(CLI::NonNegativeNumber);
    cmd->add_option("--L", a.L, "Curvature for L-stationarity (0 = 1.1 * max Lipschitz constant)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--eps", a.eps, "Stationarity tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--tau0", a.tau0, "Initial penalty of the penalty decomposition (default 1)");
    cmd->add_option("--n-starts", a.n_starts, "Number of random starts (default 2n)");
    cmd->add_option("--seed", a.seed, "Seed of the start sampler");
    cmd->add_option("--wallclock", a.wallclock, "Time limit in seconds split evenly between phases (0 = none)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", a.out, "Front CSV to write")->required();
    cmd->add_option("--meta", a.meta, "Metadata JSON (default <out>.json)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse multi-objective optimization: solvers, front descent, metrics and profiles", "sparsemoo"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* c_gen = app.add_subcommand("generate", "Write random bi-objective quadratic instances");
    c_gen->add_option("--n", gen.n, "Dimension")->check(CLI::Range(2, 100000));
    c_gen->add_option("--kappa", gen.kappa, "Condition number of both Hessians")->check(CLI::Range(1.0, 1e12));
    c_gen->add_option("--s", gen.s, "Sparsity bound stored in the instance");
    c_gen->add_option("--seed", gen.seed, "Generator seed (first seed of the grid)");
    c_gen->add_option("--out", gen.out, "Instance JSON to write");
    c_gen->add_flag("--example", gen.example, "Write the two-dimensional axis example instead");
    c_gen->add_flag("--benchmark-grid", gen.benchmark_grid, "Write the 81-instance benchmark grid into --out-dir");
    c_gen->add_option("--out-dir", gen.out_dir, "Directory for --benchmark-grid");

    SolveArgs solve;
    auto* c_solve = app.add_subcommand("solve", "Multi-start single-point solver with support-wise refinement");
    c_solve->add_option("--instance", solve.instance, "Instance JSON")->required();
    c_solve->add_option("--strategy", solve.strategy, "moiht, mospd, mohyb or scalarized");
    c_solve->add_flag("--no-refine", solve.no_refine, "Skip the MOSD refinement");
    c_solve->add_option("--threads", solve.threads, "Worker threads (0 = all cores, capped by SPARSEMOO_THREADS)");
    add_solver_flags(c_solve, solve);

    FrontArgs front;
    auto* c_front = app.add_subcommand("front", "Phase-one initialization followed by sparse front steepest descent");
    c_front->add_option("--instance", front.instance, "Instance JSON")->required();
    c_front->add_option("--init", front.init, "moiht, mospd, mohyb or scalarized");
    c_front->add_option("--budget", front.budget, "Outer front-descent sweeps");
    c_front->add_option("--crowding", front.crowding, "Crowding filter: off, mean or quantile");
    add_solver_flags(c_front, front);

    MetricsArgs met;
    auto* c_met = app.add_subcommand("metrics", "Purity, spreads and hypervolume of fronts against a reference");
    c_met->add_option("--front", met.fronts, "Front CSV as NAME=PATH (repeatable)")->required();
    c_met->add_option("--problem", met.problem, "Problem label written to the table");
    c_met->add_option("--reference", met.reference, "Reference front CSV (default: union of the fronts)");
    c_met->add_flag("--logistic", met.logistic, "Evaluate spreads on log10(f2) with min-max scaling");
    c_met->add_option("--hv-ref", met.hv_ref, "Hypervolume reference point (two values)")->expected(2);
    c_met->add_option("--out", met.out, "Metric table CSV to write")->required();
    c_met->add_option("--meta", met.meta, "Metadata JSON (default <out>.json)");

    ProfilesArgs prof;
    auto* c_prof = app.add_subcommand("profiles", "Performance profiles from metric tables");
    c_prof->add_option("--table", prof.tables, "Metric table CSV (repeatable)")->required();
    c_prof->add_option("--out-dir", prof.out_dir, "Directory for profile_<metric>.csv")->required();

    ReproduceArgs rep;
    auto* c_rep = app.add_subcommand("reproduce", "Run a manifest end to end: fronts, metrics and profiles");
    c_rep->add_option("--manifest", rep.manifest, "Experiment manifest JSON")->required()->check(CLI::ExistingFile);
    c_rep->add_option("--out-dir", rep.out_dir, "Output directory (default: the manifest's out_dir)");
    c_rep->add_option("--threads", rep.threads, "Worker threads (0 = all cores, capped by SPARSEMOO_THREADS)");
    c_rep->add_option("--wallclock", rep.wallclock, "Per-run time limit in seconds (0 = none)")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*c_gen) return cmd_generate(gen, out);
        if (*c_solve) return cmd_solve(solve, out, err);
        if (*c_front) return cmd_front(front, out, err);
        if (*c_met) return cmd_metrics(met, out);
        if (*c_prof) return cmd_profiles(prof, out);
        if (*c_rep) return cmd_reproduce(rep, out, err);
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace sparsemoo::cli
