#pragma once

// Sparse front steepest descent.
//
// Phase one turns single-point solver outputs into (point, super support)
// seeds. Phase two keeps one nondominated archive per super support J and
// sweeps it with common descent steps and partial (objective-subset) descent
// steps, never comparing points across different supports.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsemoo/core.hpp"
#include "sparsemoo/solvers.hpp"

namespace sparsemoo {

struct ArchiveEntry {
    Vector x;
    SupportSet J;
    Vector fvals;
};

/// Entries grouped by super support; within a key entries are mutually
/// nondominated and pairwise distinct (1e-10 in the infinity norm).
class ParetoArchive {
public:
    using Group = std::vector<ArchiveEntry>;

    /// Inserts the entry under its key unless it duplicates a mate; evicts
    /// mates it dominates. Returns false for duplicates.
    bool insert(ArchiveEntry entry);
    /// Adds without eviction (used for seeds that are filtered afterwards).
    void append(ArchiveEntry entry);
    /// Drops dominated entries and duplicates inside every key.
    void filter_per_key();

    const std::map<SupportSet, Group>& groups() const { return groups_; }
    std::map<SupportSet, Group>& groups() { return groups_; }
    std::size_t size() const;
    bool empty() const { return size() == 0; }
    std::vector<ArchiveEntry> entries() const;

private:
    std::map<SupportSet, Group> groups_;
};

enum class InitStrategy { moiht, mospd, mohyb, scalarized };

InitStrategy parse_strategy(const std::string& name);
std::string to_string(InitStrategy strategy);

struct Box {
    double lo = -2.0;
    double hi = 2.0;
};

using Clock = std::chrono::steady_clock;

struct InitOptions {
    InitStrategy strategy = InitStrategy::mohyb;
    int n_starts = 1;
    std::uint64_t seed = 0;
    Box box;
    SolverConfig solver;
    double assign_eps = kDefaultStationarityTol;
    std::optional<Clock::time_point> deadline;
};

/// Uniform start points in box^n for start index k come from stream k of seed.
std::vector<Vector> sample_starts(int n, int n_starts, std::uint64_t seed, Box box, const SparseBudget& budget);

ParetoArchive initialize(const MultiObjectiveProblem& problem, const SparseBudget& budget, const InitOptions& options);

/// Phase-one support assignment: descends along steepest feasible directions
/// until the support is full or x is Pareto-stationary, then completes J with
/// the smallest free indices.
std::pair<Vector, SupportSet> assign_super_support(const MultiObjectiveProblem& problem,
                                                   const Eigen::Ref<const Vector>& x, const SparseBudget& budget,
                                                   double eps, const ArmijoParams& armijo = {},
                                                   int max_steps = 100);

enum class CrowdingFilter { off, mean, quantile };

struct SfsdConfig {
    ArmijoParams armijo;
    int budget = 20;  ///< outer sweeps
    CrowdingFilter crowding = CrowdingFilter::mean;
    double crowding_quantile = 0.5;
    /// Per-key size cap applied after every sweep by dropping the entry with
    /// the smallest crowding distance until the key fits (0 = no cap).
    /// Without it partial steps roughly double the archive each sweep.
    std::size_t max_per_key = 100;
    /// Stop early once a sweep leaves the archive unchanged.
    bool stop_when_unchanged = true;
    /// After the sweeps, descend every entry in its subspace to final_eps and
    /// re-filter each key.
    bool final_polish = true;
    double final_eps = 1e-6;
    int polish_max_iter = 10000;
    std::optional<Clock::time_point> deadline;
};

struct SfsdStats {
    int sweeps = 0;
    std::size_t common_steps = 0;
    std::size_t partial_insertions = 0;
};

ParetoArchive sfsd_run(const MultiObjectiveProblem& problem, const ParetoArchive& archive0, const SparseBudget& budget,
                       const SfsdConfig& cfg, SfsdStats* stats = nullptr);

/// Nonempty proper objective subsets, by increasing size then lexicographic.
std::vector<ObjectiveSet> proper_objective_subsets(int m);

std::vector<double> crowding_distance(const std::vector<Vector>& fvals);

/// Indices (ascending) of vectors not dominated by any other; exact
/// duplicates are all kept.
std::vector<std::size_t> filter_nondominated(const std::vector<Vector>& points);

}  // namespace sparsemoo
