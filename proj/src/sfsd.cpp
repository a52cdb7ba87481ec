#include "sparsemoo/sfsd.hpp"

#include <cmath>
#include <limits>

#include "sparsemoo/rng.hpp"

namespace sparsemoo {

namespace {

constexpr double kDuplicateTol = 1e-10;
// theta values above -kThetaFloor are treated as exact zeros during sweeps;
// steps of that size only churn the archive with rounding noise.
constexpr double kThetaFloor = 1e-14;

bool same_point(const Vector& a, const Vector& b) { return (a - b).lpNorm<Eigen::Infinity>() <= kDuplicateTol; }

bool contains_exact(const ParetoArchive::Group& group, const Vector& x) {
    return std::any_of(group.begin(), group.end(), [&](const ArchiveEntry& e) { return e.x == x; });
}

std::size_t index_of(const ParetoArchive::Group& group, const Vector& x) {
    for (std::size_t i = 0; i < group.size(); ++i) {
        if (group[i].x == x) {
            return i;
        }
    }
    return group.size();
}

double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

void prune_to_cap(ParetoArchive::Group& group, std::size_t cap) {
    while (cap > 0 && group.size() > cap) {
        std::vector<Vector> fvals;
        fvals.reserve(group.size());
        for (const ArchiveEntry& e : group) {
            fvals.push_back(e.fvals);
        }
        const std::vector<double> cd = crowding_distance(fvals);
        // Extremes carry infinite distance and survive; ties go to the later entry.
        std::size_t worst = 0;
        for (std::size_t k = 1; k < cd.size(); ++k) {
            if (cd[k] <= cd[worst]) {
                worst = k;
            }
        }
        group.erase(group.begin() + static_cast<std::ptrdiff_t>(worst));
    }
}

bool crowded(const ParetoArchive::Group& group, std::size_t index, const SfsdConfig& cfg) {
    if (cfg.crowding == CrowdingFilter::off || group.size() < 3) {
        return false;
    }
    std::vector<Vector> fvals;
    fvals.reserve(group.size());
    for (const ArchiveEntry& e : group) {
        fvals.push_back(e.fvals);
    }
    const std::vector<double> cd = crowding_distance(fvals);
    std::vector<double> finite;
    for (double v : cd) {
        if (std::isfinite(v)) {
            finite.push_back(v);
        }
    }
    if (finite.empty() || !std::isfinite(cd[index])) {
        return false;
    }
    double threshold;
    if (cfg.crowding == CrowdingFilter::mean) {
        threshold = 0.0;
        for (double v : finite) {
            threshold += v;
        }
        threshold /= static_cast<double>(finite.size());
    } else {
        threshold = quantile(finite, cfg.crowding_quantile);
    }
    return cd[index] < threshold;
}

bool past(const std::optional<Clock::time_point>& deadline) {
    return deadline && Clock::now() >= *deadline;
}

}  // namespace

bool ParetoArchive::insert(ArchiveEntry entry) {
    Group& group = groups_[entry.J];
    for (const ArchiveEntry& mate : group) {
        if (same_point(mate.x, entry.x) || dominates(mate.fvals, entry.fvals)) {
            return false;
        }
    }
    std::erase_if(group, [&](const ArchiveEntry& mate) { return dominates(entry.fvals, mate.fvals); });
    group.push_back(std::move(entry));
    return true;
}

void ParetoArchive::append(ArchiveEntry entry) { groups_[entry.J].push_back(std::move(entry)); }

void ParetoArchive::filter_per_key() {
    for (auto& [key, group] : groups_) {
        std::vector<Vector> fvals;
        fvals.reserve(group.size());
        for (const ArchiveEntry& e : group) {
            fvals.push_back(e.fvals);
        }
        Group kept;
        for (std::size_t i : filter_nondominated(fvals)) {
            const bool duplicate =
                std::any_of(kept.begin(), kept.end(), [&](const ArchiveEntry& e) { return same_point(e.x, group[i].x); });
            if (!duplicate) {
                kept.push_back(std::move(group[i]));
            }
        }
        group = std::move(kept);
    }
    std::erase_if(groups_, [](const auto& item) { return item.second.empty(); });
}

std::size_t ParetoArchive::size() const {
    std::size_t total = 0;
    for (const auto& [key, group] : groups_) {
        total += group.size();
    }
    return total;
}

std::vector<ArchiveEntry> ParetoArchive::entries() const {
    std::vector<ArchiveEntry> out;
    out.reserve(size());
    for (const auto& [key, group] : groups_) {
        out.insert(out.end(), group.begin(), group.end());
    }
    return out;
}

InitStrategy parse_strategy(const std::string& name) {
    if (name == "moiht") return InitStrategy::moiht;
    if (name == "mospd") return InitStrategy::mospd;
    if (name == "mohyb") return InitStrategy::mohyb;
    if (name == "scalarized") return InitStrategy::scalarized;
    throw UsageError("unknown strategy '" + name + "' (expected moiht, mospd, mohyb or scalarized)");
}

std::string to_string(InitStrategy strategy) {
    switch (strategy) {
        case InitStrategy::moiht: return "moiht";
        case InitStrategy::mospd: return "mospd";
        case InitStrategy::mohyb: return "mohyb";
        case InitStrategy::scalarized: return "scalarized";
    }
    return "unknown";
}

std::vector<Vector> sample_starts(int n, int n_starts, std::uint64_t seed, Box box, const SparseBudget& budget) {
    const Rng root(seed);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(n_starts));
    for (int k = 0; k < n_starts; ++k) {
        Rng rng = root.split(static_cast<std::uint64_t>(k));
        Vector x(n);
        for (int i = 0; i < n; ++i) {
            x(i) = rng.uniform(box.lo, box.hi);
        }
        out.push_back(project_sparse(x, budget));
    }
    return out;
}

std::pair<Vector, SupportSet> assign_super_support(const MultiObjectiveProblem& problem,
                                                   const Eigen::Ref<const Vector>& x_in, const SparseBudget& budget,
                                                   double eps, const ArmijoParams& armijo, int max_steps) {
    if (!is_feasible(x_in, budget)) {
        throw DomainError("assign_super_support: point violates the sparsity budget");
    }
    Vector x = x_in;
    const ObjectiveSet all = all_objectives(problem.num_objectives());
    for (int step = 0; step < max_steps && l0_norm(x) < budget.s(); ++step) {
        const SparseDirectionSolution sol = theta_feasible(problem, x, budget);
        if (!(sol.theta < -eps)) {
            break;
        }
        const double alpha = armijo_common(problem, x, sol.direction, sol.theta, all, armijo);
        if (alpha == 0.0) {
            break;
        }
        // supp(direction) lies in a super support of x, so x stays feasible.
        x += alpha * sol.direction;
    }
    std::vector<int> indices = SupportSet::of(x).indices();
    for (int i = 0; static_cast<int>(indices.size()) < budget.s() && i < budget.dimension(); ++i) {
        if (std::find(indices.begin(), indices.end(), i) == indices.end()) {
            indices.push_back(i);
        }
    }
    return {x, SupportSet(std::move(indices), budget.dimension())};
}

ParetoArchive initialize(const MultiObjectiveProblem& problem, const SparseBudget& budget, const InitOptions& options) {
    if (options.n_starts < 1) {
        throw UsageError("initialize: n_starts must be at least 1");
    }
    const int n = budget.dimension();
    std::vector<Vector> points;
    if (options.strategy == InitStrategy::scalarized) {
        points = scalarized_iht(problem, budget, scalarization_grid(n), Vector::Zero(n), options.solver);
    } else {
        for (const Vector& start : sample_starts(n, options.n_starts, options.seed, options.box, budget)) {
            if (!points.empty() && past(options.deadline)) {
                break;
            }
            switch (options.strategy) {
                case InitStrategy::moiht: points.push_back(moiht(problem, start, budget, options.solver).point); break;
                case InitStrategy::mospd: points.push_back(mospd(problem, start, budget, options.solver)); break;
                case InitStrategy::mohyb: points.push_back(mohyb(problem, start, budget, options.solver).point); break;
                case InitStrategy::scalarized: break;
            }
        }
    }
    ParetoArchive archive;
    for (const Vector& p : points) {
        auto [x, J] = assign_super_support(problem, p, budget, options.assign_eps, options.solver.armijo);
        Vector f = problem.evaluate(x);
        archive.append({std::move(x), std::move(J), std::move(f)});
    }
    archive.filter_per_key();
    return archive;
}

std::vector<ObjectiveSet> proper_objective_subsets(int m) {
    std::vector<ObjectiveSet> out;
    for (int size = 1; size < m; ++size) {
        for_each_combination(m, size, [&](const std::vector<int>& pick) {
            out.push_back(pick);
            return true;
        });
    }
    return out;
}

ParetoArchive sfsd_run(const MultiObjectiveProblem& problem, const ParetoArchive& archive0, const SparseBudget& budget,
                       const SfsdConfig& cfg, SfsdStats* stats) {
    const int m = problem.num_objectives();
    const ObjectiveSet all = all_objectives(m);
    const std::vector<ObjectiveSet> subsets = proper_objective_subsets(m);
    for (const auto& [key, group] : archive0.groups()) {
        if (static_cast<int>(key.size()) != budget.s() || key.dimension() != budget.dimension()) {
            throw UsageError("sfsd_run: archive key is not a super support of size s");
        }
        for (const ArchiveEntry& e : group) {
            if (!key.includes(SupportSet::of(e.x))) {
                throw UsageError("sfsd_run: archive entry has nonzeros outside its key");
            }
        }
    }
    SfsdStats local;
    ParetoArchive work = archive0;

    for (int sweep = 0; sweep < cfg.budget && !past(cfg.deadline); ++sweep) {
        bool changed = false;
        const std::vector<ArchiveEntry> snapshot = work.entries();
        for (const ArchiveEntry& current : snapshot) {
            if (past(cfg.deadline)) {
                break;
            }
            const SupportSet& J = current.J;
            if (!contains_exact(work.groups()[J], current.x)) {
                continue;
            }

            // Common descent step in the subspace of J.
            const DirectionSolution common = theta_subspace(problem.gradients(current.x), J, all);
            double alpha = 0.0;
            if (common.theta < -kThetaFloor) {
                alpha = armijo_common(problem, current.x, common.direction, common.theta, all, cfg.armijo,
                                      &current.fvals);
            }
            Vector z = current.x;
            Vector fz = current.fvals;
            if (alpha > 0.0) {
                z = current.x + alpha * common.direction;
                fz = problem.evaluate(z);
                if (work.insert({z, J, fz})) {
                    changed = true;
                    ++local.common_steps;
                }
            }

            // Partial descent steps from z over objective subsets.
            {
                const ParetoArchive::Group& group = work.groups()[J];
                const std::size_t zi = index_of(group, z);
                if (zi == group.size() || crowded(group, zi, cfg)) {
                    continue;
                }
            }
            const Matrix gz = problem.gradients(z);
            for (const ObjectiveSet& subset : subsets) {
                const ParetoArchive::Group& group = work.groups()[J];
                if (!contains_exact(group, z)) {
                    break;
                }
                const DirectionSolution partial = theta_subspace(gz, J, subset);
                if (!(partial.theta < -kThetaFloor)) {
                    continue;
                }
                double step = cfg.armijo.alpha0;
                for (int h = 0; h <= cfg.armijo.max_backtracks; ++h, step *= cfg.armijo.delta) {
                    const Vector candidate = z + step * partial.direction;
                    const Vector fc = problem.evaluate(candidate);
                    if (!fc.allFinite()) {
                        continue;
                    }
                    const bool improves_on_all = std::all_of(group.begin(), group.end(), [&](const ArchiveEntry& y) {
                        return (fc.array() < y.fvals.array()).any();
                    });
                    if (improves_on_all) {
                        if (work.insert({candidate, J, fc})) {
                            changed = true;
                            ++local.partial_insertions;
                        }
                        break;
                    }
                }
            }
        }
        for (auto& [key, group] : work.groups()) {
            prune_to_cap(group, cfg.max_per_key);
        }
        ++local.sweeps;
        if (!changed && cfg.stop_when_unchanged) {
            break;
        }
    }

    if (cfg.final_polish) {
        SolverConfig polish;
        polish.armijo = cfg.armijo;
        polish.max_iter = cfg.polish_max_iter;
        ParetoArchive polished;
        for (const ArchiveEntry& e : work.entries()) {
            Vector x = mosd(problem, e.x, e.J, cfg.final_eps, polish).point;
            Vector f = problem.evaluate(x);
            polished.append({std::move(x), e.J, std::move(f)});
        }
        polished.filter_per_key();
        work = std::move(polished);
    }
    if (stats) {
        *stats = local;
    }
    return work;
}

std::vector<double> crowding_distance(const std::vector<Vector>& fvals) {
    const std::size_t count = fvals.size();
    std::vector<double> out(count, 0.0);
    if (count == 0) {
        return out;
    }
    const double inf = std::numeric_limits<double>::infinity();
    const Eigen::Index m = fvals.front().size();
    std::vector<std::size_t> order(count);
    for (Eigen::Index j = 0; j < m; ++j) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fvals[a](j) < fvals[b](j); });
        const double range = fvals[order.back()](j) - fvals[order.front()](j);
        out[order.front()] = inf;
        out[order.back()] = inf;
        if (range <= 0.0) {
            continue;
        }
        for (std::size_t k = 1; k + 1 < count; ++k) {
            out[order[k]] += (fvals[order[k + 1]](j) - fvals[order[k - 1]](j)) / range;
        }
    }
    return out;
}

std::vector<std::size_t> filter_nondominated(const std::vector<Vector>& points) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t k = 0; k < points.size() && !dominated; ++k) {
            dominated = k != i && dominates(points[k], points[i]);
        }
        if (!dominated) {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace sparsemoo
