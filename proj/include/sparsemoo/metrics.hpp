#pragma once

// Front-quality metrics and Dolan-More performance profiles.
//
// Spread metrics follow the usual derivative-free multi-objective
// benchmarking definitions:
//
//   Gamma = max_j max_i (f_j(x_{i+1}) - f_j(x_i)), points sorted by f_j and
//           augmented with the reference front's extreme points;
//   Delta = (d_0 + d_N + sum_i |d_i - mean(d)|) / (d_0 + d_N + (N-1) mean(d)),
//           d_i consecutive Euclidean gaps along f_1, d_0 / d_N distances of
//           the end points to the reference extremes.

#include <optional>
#include <string>
#include <vector>

#include "sparsemoo/core.hpp"

namespace sparsemoo {

struct FrontRow {
    Vector f;
    std::optional<Vector> x;
    std::optional<SupportSet> support;
};

struct Front {
    std::vector<FrontRow> rows;

    static Front from_values(const std::vector<Vector>& values);
    std::size_t size() const { return rows.size(); }
    bool empty() const { return rows.empty(); }
    int num_objectives() const { return rows.empty() ? 0 : static_cast<int>(rows.front().f.size()); }
    std::vector<Vector> values() const;
};

inline constexpr double kPurityTol = 1e-9;

/// Union of the fronts with dominated rows removed and exact duplicates kept once.
Front build_reference_front(const std::vector<Front>& fronts);

/// Rows not dominated by any other row, first copy of exact duplicates only.
Front nondominated_subset(const Front& front);

double purity(const Front& front, const Front& reference);
double gamma_spread(const Front& front, const Front& reference);
double delta_spread(const Front& front, const Front& reference);
double hypervolume_2d(const Front& front, const Eigen::Ref<const Vector>& ref_point);

/// Componentwise max over the fronts pushed outwards by (scale - 1) times
/// max(|max|, max - min); for positive fronts this is usually max * scale.
Vector default_hypervolume_reference(const std::vector<Front>& fronts, double scale = 1.1);

/// Applies log10 to f2 (floored at 1e-16), then min-max rescales both
/// objectives to [0, 1] with bounds taken over all the given fronts.
void rescale_for_spread(std::vector<Front*> fronts);

struct ProfileCurve {
    std::vector<double> tau;  ///< breakpoints, ascending, first is 1
    std::vector<double> rho;  ///< fraction of problems with ratio <= tau

    double at(double t) const;
};

/// values(p, s): metric of solver s on problem p; NaN marks a failure.
/// higher_is_better inverts entries first; zeros then count as failures.
std::vector<ProfileCurve> performance_profiles(const Eigen::Ref<const Matrix>& values, bool higher_is_better);

}  // namespace sparsemoo
