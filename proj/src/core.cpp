#include "sparsemoo/core.hpp"

#include <limits>
#include <sstream>

namespace sparsemoo {

SupportSet::SupportSet(std::vector<int> indices, int n) : indices_(std::move(indices)), n_(n) {
    if (n < 0) {
        throw UsageError("SupportSet: negative dimension");
    }
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
        throw UsageError("SupportSet: duplicate index");
    }
    if (!indices_.empty() && (indices_.front() < 0 || indices_.back() >= n)) {
        throw UsageError("SupportSet: index out of range");
    }
}

SupportSet SupportSet::full(int n) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    return SupportSet(std::move(idx), n);
}

SupportSet SupportSet::of(const Eigen::Ref<const Vector>& x) {
    std::vector<int> idx;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::abs(x(i)) > kZeroTol) {
            idx.push_back(static_cast<int>(i));
        }
    }
    return SupportSet(std::move(idx), static_cast<int>(x.size()));
}

bool SupportSet::contains(int i) const {
    return std::binary_search(indices_.begin(), indices_.end(), i);
}

bool SupportSet::includes(const SupportSet& other) const {
    return std::includes(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end());
}

SupportSet SupportSet::complement() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n_) - indices_.size());
    for (int i = 0; i < n_; ++i) {
        if (!contains(i)) {
            out.push_back(i);
        }
    }
    return SupportSet(std::move(out), n_);
}

std::string SupportSet::to_string() const {
    std::string out;
    for (std::size_t k = 0; k < indices_.size(); ++k) {
        if (k > 0) {
            out += ';';
        }
        out += std::to_string(indices_[k] + 1);
    }
    return out;
}

SupportSet SupportSet::parse(const std::string& text, int n) {
    std::vector<int> idx;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) {
            continue;
        }
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(item, &used);
        } catch (const std::exception&) {
            throw DataError("support '" + text + "': not an integer list");
        }
        if (used != item.size()) {
            throw DataError("support '" + text + "': not an integer list");
        }
        idx.push_back(value - 1);
    }
    return SupportSet(std::move(idx), n);
}

SparseBudget::SparseBudget(int s, int n) : s_(s), n_(n) {
    if (s < 1 || s >= n) {
        throw UsageError("sparsity budget must satisfy 1 <= s < n (s=" + std::to_string(s) +
                         ", n=" + std::to_string(n) + ")");
    }
}

unsigned long long binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    unsigned long long result = 1;
    for (int i = 1; i <= k; ++i) {
        const unsigned long long num = static_cast<unsigned long long>(n - k + i);
        // result * num / i is exact at every step; guard the multiplication.
        if (result > std::numeric_limits<unsigned long long>::max() / num) {
            return std::numeric_limits<unsigned long long>::max();
        }
        result = result * num / static_cast<unsigned long long>(i);
    }
    return result;
}

std::vector<SupportSet> super_supports(const Eigen::Ref<const Vector>& x, const SparseBudget& budget) {
    if (!is_feasible(x, budget)) {
        throw DomainError("super_supports: point violates the sparsity budget");
    }
    const int n = budget.dimension();
    const SupportSet base = SupportSet::of(x);
    const std::vector<int> free = base.complement().indices();
    const int missing = budget.s() - static_cast<int>(base.size());

    std::vector<SupportSet> out;
    for_each_combination(static_cast<int>(free.size()), missing, [&](const std::vector<int>& pick) {
        std::vector<int> idx = base.indices();
        for (int p : pick) {
            idx.push_back(free[static_cast<std::size_t>(p)]);
        }
        out.emplace_back(std::move(idx), n);
        return true;
    });
    std::sort(out.begin(), out.end());
    return out;
}

Vector gather(const Eigen::Ref<const Vector>& x, const std::vector<int>& indices) {
    Vector out(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t k = 0; k < indices.size(); ++k) {
        out(static_cast<Eigen::Index>(k)) = x(indices[k]);
    }
    return out;
}

}  // namespace sparsemoo
