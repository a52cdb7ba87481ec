#include "sparsemoo/metrics.hpp"

#include <cmath>
#include <limits>

namespace sparsemoo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_values(const Vector& a, const Vector& b) { return a.size() == b.size() && a == b; }

void require_objectives(const Front& front, int m, const char* what) {
    for (const FrontRow& row : front.rows) {
        if (row.f.size() != m) {
            throw DataError(std::string(what) + ": rows with different numbers of objectives");
        }
        if (!row.f.allFinite()) {
            throw DataError(std::string(what) + ": non-finite objective value");
        }
    }
}

// Reference point minimizing objective j, ties broken by the remaining
// objectives in order.
Vector extreme_point(const Front& reference, Eigen::Index j) {
    const FrontRow* best = &reference.rows.front();
    for (const FrontRow& row : reference.rows) {
        if (row.f(j) < best->f(j)) {
            best = &row;
        } else if (row.f(j) == best->f(j)) {
            for (Eigen::Index k = 0; k < row.f.size(); ++k) {
                if (row.f(k) != best->f(k)) {
                    if (row.f(k) < best->f(k)) {
                        best = &row;
                    }
                    break;
                }
            }
        }
    }
    return best->f;
}

std::vector<Vector> sorted_by_first(const Front& front) {
    std::vector<Vector> pts = front.values();
    std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    return pts;
}

}  // namespace

Front Front::from_values(const std::vector<Vector>& values) {
    Front out;
    for (const Vector& v : values) {
        out.rows.push_back({v, std::nullopt, std::nullopt});
    }
    return out;
}

std::vector<Vector> Front::values() const {
    std::vector<Vector> out;
    out.reserve(rows.size());
    for (const FrontRow& row : rows) {
        out.push_back(row.f);
    }
    return out;
}

Front nondominated_subset(const Front& front) {
    Front out;
    for (std::size_t i = 0; i < front.rows.size(); ++i) {
        const Vector& fi = front.rows[i].f;
        bool drop = false;
        for (std::size_t k = 0; k < front.rows.size() && !drop; ++k) {
            if (k == i) {
                continue;
            }
            const Vector& fk = front.rows[k].f;
            drop = dominates(fk, fi) || (k < i && same_values(fk, fi));
        }
        if (!drop) {
            out.rows.push_back(front.rows[i]);
        }
    }
    return out;
}

Front build_reference_front(const std::vector<Front>& fronts) {
    Front all;
    int m = 0;
    for (const Front& f : fronts) {
        if (!f.empty()) {
            m = f.num_objectives();
            break;
        }
    }
    for (const Front& f : fronts) {
        require_objectives(f, m, "build_reference_front");
        all.rows.insert(all.rows.end(), f.rows.begin(), f.rows.end());
    }
    return nondominated_subset(all);
}

double purity(const Front& front, const Front& reference) {
    if (reference.empty()) {
        throw UsageError("purity: empty reference front");
    }
    if (front.empty()) {
        return 0.0;
    }
    std::size_t matched = 0;
    for (const FrontRow& row : front.rows) {
        const bool found = std::any_of(reference.rows.begin(), reference.rows.end(), [&](const FrontRow& ref) {
            return ref.f.size() == row.f.size() && (ref.f - row.f).lpNorm<Eigen::Infinity>() <= kPurityTol;
        });
        matched += found ? 1 : 0;
    }
    return static_cast<double>(matched) / static_cast<double>(front.size());
}

double gamma_spread(const Front& front, const Front& reference) {
    if (front.empty()) {
        return kInf;
    }
    const int m = front.num_objectives();
    require_objectives(front, m, "gamma_spread");
    require_objectives(reference, m, "gamma_spread");
    std::vector<Vector> extremes;
    if (!reference.empty()) {
        for (Eigen::Index j = 0; j < m; ++j) {
            extremes.push_back(extreme_point(reference, j));
        }
    }
    double gamma = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        std::vector<double> coords;
        for (const FrontRow& row : front.rows) {
            coords.push_back(row.f(j));
        }
        for (const Vector& e : extremes) {
            coords.push_back(e(j));
        }
        std::sort(coords.begin(), coords.end());
        for (std::size_t i = 1; i < coords.size(); ++i) {
            gamma = std::max(gamma, coords[i] - coords[i - 1]);
        }
    }
    return gamma;
}

double delta_spread(const Front& front, const Front& reference) {
    if (front.size() < 2) {
        return kInf;
    }
    if (front.num_objectives() != 2) {
        throw UsageError("delta_spread: defined for two objectives");
    }
    if (reference.empty()) {
        throw UsageError("delta_spread: empty reference front");
    }
    require_objectives(front, 2, "delta_spread");
    require_objectives(reference, 2, "delta_spread");
    const std::vector<Vector> pts = sorted_by_first(front);
    const std::size_t N = pts.size();
    std::vector<double> gaps;
    for (std::size_t i = 1; i < N; ++i) {
        gaps.push_back((pts[i] - pts[i - 1]).norm());
    }
    double mean = 0.0;
    for (double g : gaps) {
        mean += g;
    }
    mean /= static_cast<double>(gaps.size());
    const double d_first = (pts.front() - extreme_point(reference, 0)).norm();
    const double d_last = (pts.back() - extreme_point(reference, 1)).norm();
    double spread = 0.0;
    for (double g : gaps) {
        spread += std::abs(g - mean);
    }
    const double numerator = d_first + d_last + spread;
    const double denominator = d_first + d_last + static_cast<double>(N - 1) * mean;
    if (denominator == 0.0) {
        return numerator == 0.0 ? 0.0 : kInf;
    }
    return numerator / denominator;
}

double hypervolume_2d(const Front& front, const Eigen::Ref<const Vector>& ref_point) {
    if (ref_point.size() != 2) {
        throw UsageError("hypervolume_2d: reference point must have two coordinates");
    }
    Front inside;
    for (const FrontRow& row : front.rows) {
        if (row.f.size() != 2) {
            throw DataError("hypervolume_2d: rows must have two objectives");
        }
        if (row.f(0) < ref_point(0) && row.f(1) < ref_point(1)) {
            inside.rows.push_back(row);
        }
    }
    const std::vector<Vector> pts = sorted_by_first(nondominated_subset(inside));
    double area = 0.0;
    double ceiling = ref_point(1);
    for (const Vector& p : pts) {
        area += (ref_point(0) - p(0)) * (ceiling - p(1));
        ceiling = p(1);
    }
    return area;
}

Vector default_hypervolume_reference(const std::vector<Front>& fronts, double scale) {
    Vector hi, lo;
    for (const Front& f : fronts) {
        for (const FrontRow& row : f.rows) {
            hi = hi.size() == 0 ? row.f : hi.cwiseMax(row.f);
            lo = lo.size() == 0 ? row.f : lo.cwiseMin(row.f);
        }
    }
    if (hi.size() == 0) {
        throw UsageError("default_hypervolume_reference: no rows");
    }
    // Equals hi * scale for positive fronts whose spread is below their
    // maximum; the margin stays positive when objectives reach zero or below.
    const Vector margin = hi.cwiseAbs().cwiseMax(hi - lo);
    return hi + (scale - 1.0) * margin;
}

void rescale_for_spread(std::vector<Front*> fronts) {
    Vector lo, hi;
    for (Front* f : fronts) {
        for (FrontRow& row : f->rows) {
            if (row.f.size() != 2) {
                throw DataError("rescale_for_spread: two objectives expected");
            }
            row.f(1) = std::log10(std::max(row.f(1), 1e-16));
            lo = lo.size() == 0 ? row.f : lo.cwiseMin(row.f);
            hi = hi.size() == 0 ? row.f : hi.cwiseMax(row.f);
        }
    }
    if (lo.size() == 0) {
        return;
    }
    for (Front* f : fronts) {
        for (FrontRow& row : f->rows) {
            for (Eigen::Index j = 0; j < 2; ++j) {
                const double range = hi(j) - lo(j);
                row.f(j) = range > 0.0 ? (row.f(j) - lo(j)) / range : 0.0;
            }
        }
    }
}

double ProfileCurve::at(double t) const {
    double value = 0.0;
    for (std::size_t k = 0; k < tau.size() && tau[k] <= t; ++k) {
        value = rho[k];
    }
    return value;
}

std::vector<ProfileCurve> performance_profiles(const Eigen::Ref<const Matrix>& values, bool higher_is_better) {
    const Eigen::Index P = values.rows();
    const Eigen::Index S = values.cols();
    Matrix cost(P, S);
    for (Eigen::Index p = 0; p < P; ++p) {
        for (Eigen::Index s = 0; s < S; ++s) {
            const double v = values(p, s);
            if (std::isnan(v) || std::isinf(v)) {
                cost(p, s) = kInf;
            } else if (v < 0.0 || (v == 0.0 && !higher_is_better)) {
                throw DataError("performance_profiles: nonpositive value at problem " + std::to_string(p + 1) +
                                ", solver " + std::to_string(s + 1));
            } else if (higher_is_better) {
                cost(p, s) = v == 0.0 ? kInf : 1.0 / v;
            } else {
                cost(p, s) = v;
            }
        }
    }
    Matrix ratio = Matrix::Constant(P, S, kInf);
    std::vector<double> breakpoints{1.0};
    for (Eigen::Index p = 0; p < P; ++p) {
        const double best = cost.row(p).minCoeff();
        if (!std::isfinite(best)) {
            continue;
        }
        for (Eigen::Index s = 0; s < S; ++s) {
            if (std::isfinite(cost(p, s))) {
                ratio(p, s) = cost(p, s) / best;
                breakpoints.push_back(ratio(p, s));
            }
        }
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    std::vector<ProfileCurve> curves(static_cast<std::size_t>(S));
    for (Eigen::Index s = 0; s < S; ++s) {
        ProfileCurve& curve = curves[static_cast<std::size_t>(s)];
        curve.tau = breakpoints;
        for (double t : breakpoints) {
            Eigen::Index solved = 0;
            for (Eigen::Index p = 0; p < P; ++p) {
                solved += ratio(p, s) <= t ? 1 : 0;
            }
            curve.rho.push_back(P == 0 ? 0.0 : static_cast<double>(solved) / static_cast<double>(P));
        }
    }
    return curves;
}

}  // namespace sparsemoo
