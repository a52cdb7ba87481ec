#pragma once

// Command-line front end. The subcommands generate, solve, front, metrics,
// profiles and reproduce are thin wrappers around the pipelines below, which
// the tests drive directly.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sparsemoo/io.hpp"
#include "sparsemoo/metrics.hpp"
#include "sparsemoo/sfsd.hpp"

namespace sparsemoo::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitEmpty = 2, kExitCapacity = 3 };

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Worker threads: `requested` (0 = hardware concurrency), capped by the
/// SPARSEMOO_THREADS environment variable when it holds a positive integer.
unsigned worker_count(unsigned requested = 0);

struct RunReport {
    Front front;
    nlohmann::json meta;
};

struct SolveOptions {
    InitStrategy strategy = InitStrategy::mohyb;
    std::optional<int> n_starts;  ///< unset means 2n
    std::uint64_t seed = 0;
    Box box;
    SolverConfig solver;
    bool refine = true;
    double wallclock = 0.0;  ///< seconds, 0 disables the time limit
    unsigned threads = 0;
};

/// Multi-start single-point solver, MOSD refinement of every output on its
/// own support, then a nondominance filter across all points.
RunReport multistart_front(const MultiObjectiveProblem& problem, const SparseBudget& budget,
                           const SolveOptions& options);

struct FrontOptions {
    InitStrategy init = InitStrategy::mohyb;
    std::optional<int> n_starts;
    std::uint64_t seed = 0;
    Box box;
    SolverConfig solver;
    SfsdConfig sfsd;
    double wallclock = 0.0;
};

/// Phase-one initialization, phase-two sweeps, then a nondominance filter
/// across support keys.
RunReport sfsd_front(const MultiObjectiveProblem& problem, const SparseBudget& budget, const FrontOptions& options);

/// Solver defaults and start box for the instance type.
SolverConfig solver_defaults(bool logistic);
Box start_box(bool logistic);

struct MetricRow {
    std::string problem;
    std::string solver;
    double purity = 0.0;
    double gamma_spread = 0.0;
    double delta_spread = 0.0;
    double hypervolume = 0.0;
};

inline const std::vector<std::string> kMetricNames{"purity", "gamma_spread", "delta_spread", "hypervolume"};

/// All four metrics of every named front against `reference` (built from
/// the fronts when absent). `logistic` switches spreads to the log-scaled,
/// min-max normalized objective space.
std::vector<MetricRow> compute_metrics(const std::string& problem,
                                       const std::vector<std::pair<std::string, Front>>& fronts, bool logistic,
                                       const std::optional<Front>& reference = std::nullopt,
                                       const std::optional<Vector>& hv_ref = std::nullopt,
                                       nlohmann::json* meta = nullptr);

std::string metrics_csv(const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metrics_csv(const std::string& path);

/// Zero values of lower-is-better metrics are raised to this before profiling.
inline constexpr double kProfileZeroFloor = 1e-12;

struct ProfileSet {
    std::vector<std::string> solvers;
    std::vector<ProfileCurve> curves;  ///< one per solver
};

/// Performance profiles per metric over the problems found in `rows`.
std::map<std::string, ProfileSet> profiles_from_rows(const std::vector<MetricRow>& rows);

std::string profile_csv(const ProfileSet& set);

}  // namespace sparsemoo::cli
