#pragma once

// Quality indicators over objective-space point sets: generational distance,
// binary coverage, spacing and the M2* niche count.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "moea/benchmarks.hpp"
#include "moea/core.hpp"

namespace moea {

using SolutionSet = std::vector<ObjectiveVector>;

struct IndicatorConfig {
    /// Norm used to aggregate nearest distances in GD (2 = Euclidean).
    int q = 2;
    /// Niche radius as a fraction of the largest pairwise distance in the set.
    double sigma_fraction = 0.10;

    void validate() const
    {
        require(q >= 1, "indicator q must be a positive integer");
        require(sigma_fraction > 0.0 && sigma_fraction < 1.0, "sigma_fraction must lie in (0,1)");
    }
};

namespace detail {

inline void require_same_dimension(const SolutionSet& s, std::size_t m, const char* what)
{
    for (const auto& p : s) require(p.size() == m, std::string(what) + ": points differ in dimension");
}

inline double squared_distance(const ObjectiveVector& a, const ObjectiveVector& b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

} // namespace detail

/// Exact Euclidean nearest-neighbour queries against a fixed point set.
/// Points are kept sorted on the first coordinate and the scan stops once that
/// coordinate alone exceeds the best distance found.
class NearestPointIndex {
public:
    explicit NearestPointIndex(SolutionSet points) : points_(std::move(points))
    {
        require(!points_.empty(), "nearest-point index: empty reference set");
        std::sort(points_.begin(), points_.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
    }

    [[nodiscard]] double distance(const ObjectiveVector& z) const
    {
        require(z.size() == points_.front().size(), "nearest-point query: dimension mismatch");
        const auto mid = std::lower_bound(points_.begin(), points_.end(), z[0],
                                          [](const ObjectiveVector& p, double v) { return p[0] < v; });
        double best = kInfinity;
        for (auto it = mid; it != points_.end(); ++it) {
            const double dx = (*it)[0] - z[0];
            if (dx * dx >= best) break;
            best = std::min(best, detail::squared_distance(*it, z));
        }
        for (auto it = mid; it != points_.begin();) {
            --it;
            const double dx = z[0] - (*it)[0];
            if (dx * dx >= best) break;
            best = std::min(best, detail::squared_distance(*it, z));
        }
        return std::sqrt(best);
    }

private:
    SolutionSet points_;
};

/// (sum_i d_i^q)^(1/q) / |S| where d_i is the distance from S_i to the
/// nearest sampled front point.
inline double gd(const SolutionSet& s, const NearestPointIndex& front, const IndicatorConfig& cfg = {})
{
    cfg.validate();
    require(!s.empty(), "gd: empty solution set");
    double acc = 0.0;
    for (const auto& z : s) acc += std::pow(front.distance(z), cfg.q);
    return std::pow(acc, 1.0 / cfg.q) / static_cast<double>(s.size());
}

inline double gd(const SolutionSet& s, const SolutionSet& front, const IndicatorConfig& cfg = {})
{
    require(!front.empty(), "gd: empty reference front");
    detail::require_same_dimension(s, front.front().size(), "gd");
    return gd(s, NearestPointIndex(front), cfg);
}

inline double gd(const SolutionSet& s, const ReferenceFront& front, const IndicatorConfig& cfg = {})
{
    return gd(s, front.points, cfg);
}

/// Fraction of s2 weakly dominated by at least one member of s1.
inline double coverage(const SolutionSet& s1, const SolutionSet& s2)
{
    require(!s2.empty(), "coverage: empty second set");
    if (s1.empty()) return 0.0;
    detail::require_same_dimension(s2, s1.front().size(), "coverage");
    std::size_t covered = 0;
    for (const auto& b : s2) {
        if (std::any_of(s1.begin(), s1.end(), [&](const auto& a) { return weakly_dominates(a, b); })) ++covered;
    }
    return static_cast<double>(covered) / static_cast<double>(s2.size());
}

/// Sample standard deviation of nearest-neighbour L1 distances.
inline double spacing(const SolutionSet& s)
{
    require(s.size() >= 2, "spacing: need at least two points");
    detail::require_same_dimension(s, s.front().size(), "spacing");
    std::vector<double> d(s.size(), kInfinity);
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (i == j) continue;
            double l1 = 0.0;
            for (std::size_t k = 0; k < s[i].size(); ++k) l1 += std::abs(s[i][k] - s[j][k]);
            d[i] = std::min(d[i], l1);
        }
    }
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(s.size() - 1));
}

/// M2*: for each point, the number of others strictly farther than sigma,
/// summed and divided by |S| - 1. Ranges over [0, |S|].
inline double niche_count(const SolutionSet& s, const IndicatorConfig& cfg = {})
{
    cfg.validate();
    require(s.size() >= 2, "niche_count: need at least two points");
    detail::require_same_dimension(s, s.front().size(), "niche_count");
    double max_d2 = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) max_d2 = std::max(max_d2, detail::squared_distance(s[i], s[j]));
    }
    const double sigma = cfg.sigma_fraction * std::sqrt(max_d2);
    std::size_t far = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            if (std::sqrt(detail::squared_distance(s[i], s[j])) > sigma) far += 2;
        }
    }
    return static_cast<double>(far) / static_cast<double>(s.size() - 1);
}

} // namespace moea
