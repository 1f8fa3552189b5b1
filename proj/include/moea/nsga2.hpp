#pragma once

// NSGA-II: fast non-dominated sorting, crowding distance in two flavours,
// elitist environmental selection and the generation loop.

#include <algorithm>
#include <functional>
#include <numeric>
#include <string_view>
#include <vector>

#include "moea/benchmarks.hpp"
#include "moea/core.hpp"
#include "moea/operators.hpp"

namespace moea {

/// Crowding distance definition.
///
/// Initial: an interior member accumulates the normalized gap between its two
/// sort neighbours, (f[n+1] - f[n-1]) / (f_max - f_min). Every point inside
/// the box spanned by the neighbours scores the same.
///
/// Improved: the accumulated gap runs from the member itself to its upper
/// neighbour, (f[n+1] - f[n]) / (f_max - f_min), so points closer to the
/// ideal corner of that box score higher.
///
/// Both give +infinity to the first and last member of every per-objective
/// ordering.
enum class CrowdingMode { Initial, Improved };

enum class Normalization {
    ObjectiveRange, ///< divide by f_max - f_min of the front (objective skipped when zero)
    None,           ///< raw objective gaps
};

inline std::string_view mode_name(CrowdingMode mode)
{
    return mode == CrowdingMode::Initial ? "initial" : "improved";
}

inline CrowdingMode parse_mode(std::string_view name)
{
    const auto s = lowercase(name);
    if (s == "initial") return CrowdingMode::Initial;
    if (s == "improved") return CrowdingMode::Improved;
    throw ContractViolation("unknown crowding mode: " + std::string(name));
}

struct RankPartition {
    std::vector<std::vector<std::size_t>> fronts;
};

/// Deb's O(m N^2) sort over raw objective vectors.
inline RankPartition fast_nondominated_sort(std::span<const ObjectiveVector> points)
{
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> dominated_by_me(n);
    std::vector<std::size_t> domination_count(n, 0);
    RankPartition part;
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(points[p], points[q])) {
                dominated_by_me[p].push_back(q);
                ++domination_count[q];
            } else if (dominates(points[q], points[p])) {
                dominated_by_me[q].push_back(p);
                ++domination_count[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (domination_count[p] == 0) current.push_back(p);
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto p : current) {
            for (auto q : dominated_by_me[p]) {
                if (--domination_count[q] == 0) next.push_back(q);
            }
        }
        std::sort(next.begin(), next.end());
        part.fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return part;
}

inline std::vector<ObjectiveVector> objectives_of(const Population& pop)
{
    std::vector<ObjectiveVector> out;
    out.reserve(pop.size());
    for (const auto& ind : pop) out.push_back(ind.f);
    return out;
}

/// Sorts the population and writes each member's rank annotation.
inline RankPartition fast_nondominated_sort(Population& pop)
{
    auto part = fast_nondominated_sort(objectives_of(pop));
    for (std::size_t r = 0; r < part.fronts.size(); ++r) {
        for (auto i : part.fronts[r]) pop[i].rank = r;
    }
    return part;
}

/// Order of `front` by objective k. Ties on k fall back to the remaining
/// objectives in descending order, then to position. For two objectives this
/// makes the f1 and f2 orderings exact reverses of each other even when
/// values repeat.
inline std::vector<std::size_t> objective_order(std::span<const ObjectiveVector> front, std::size_t k)
{
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& fa = front[a];
        const auto& fb = front[b];
        if (fa[k] != fb[k]) return fa[k] < fb[k];
        for (std::size_t j = 0; j < fa.size(); ++j) {
            if (j == k || fa[j] == fb[j]) continue;
            return fa[j] > fb[j];
        }
        return false;
    });
    return order;
}

inline std::vector<double> crowding_distances(std::span<const ObjectiveVector> front, CrowdingMode mode,
                                              Normalization norm = Normalization::ObjectiveRange)
{
    const std::size_t n = front.size();
    std::vector<double> dist(n, 0.0);
    if (n == 0) return dist;
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), kInfinity);
        return dist;
    }
    const std::size_t m = front.front().size();
    for (std::size_t k = 0; k < m; ++k) {
        const auto order = objective_order(front, k);
        const double lo = front[order.front()][k];
        const double hi = front[order.back()][k];
        dist[order.front()] = kInfinity;
        dist[order.back()] = kInfinity;
        double denom = 1.0;
        if (norm == Normalization::ObjectiveRange) {
            // A flat objective carries no spacing information.
            if (hi == lo) continue;
            denom = hi - lo;
        }
        for (std::size_t pos = 1; pos + 1 < n; ++pos) {
            const std::size_t i = order[pos];
            const double upper = front[order[pos + 1]][k];
            const double lower = mode == CrowdingMode::Initial ? front[order[pos - 1]][k] : front[i][k];
            dist[i] += (upper - lower) / denom;
        }
    }
    return dist;
}

inline std::vector<double> crowding_initial(std::span<const ObjectiveVector> front,
                                            Normalization norm = Normalization::ObjectiveRange)
{
    return crowding_distances(front, CrowdingMode::Initial, norm);
}

inline std::vector<double> crowding_improved(std::span<const ObjectiveVector> front,
                                             Normalization norm = Normalization::ObjectiveRange)
{
    return crowding_distances(front, CrowdingMode::Improved, norm);
}

/// Computes crowding over the members listed in `front` and stores it on them.
inline void assign_crowding(Population& pop, std::span<const std::size_t> front, CrowdingMode mode)
{
    std::vector<ObjectiveVector> pts;
    pts.reserve(front.size());
    for (auto i : front) pts.push_back(pop[i].f);
    const auto dist = crowding_distances(pts, mode);
    for (std::size_t j = 0; j < front.size(); ++j) pop[front[j]].crowding = dist[j];
}

/// Keeps `capacity` members: whole fronts in rank order while they fit, then
/// the most crowded-apart members of the first front that does not fit.
/// Equal crowding at the cut keeps the lower input index.
inline Population environmental_select(Population merged, std::size_t capacity, CrowdingMode mode)
{
    require(capacity > 0, "environmental_select: capacity must be positive");
    require(merged.size() >= capacity, "environmental_select: fewer candidates than capacity");
    const auto part = fast_nondominated_sort(merged);
    Population next;
    next.capacity = capacity;
    next.members.reserve(capacity);
    for (const auto& front : part.fronts) {
        assign_crowding(merged, front, mode);
        const std::size_t room = capacity - next.size();
        if (front.size() <= room) {
            for (auto i : front) next.members.push_back(std::move(merged[i]));
        } else {
            std::vector<std::size_t> order(front.begin(), front.end());
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (*merged[a].crowding != *merged[b].crowding) return *merged[a].crowding > *merged[b].crowding;
                return a < b;
            });
            for (std::size_t j = 0; j < room; ++j) next.members.push_back(std::move(merged[order[j]]));
        }
        if (next.size() == capacity) break;
    }
    return next;
}

inline Population merge(Population a, Population b)
{
    a.members.insert(a.members.end(), std::make_move_iterator(b.members.begin()), std::make_move_iterator(b.members.end()));
    a.capacity = a.capacity + b.capacity;
    return a;
}

/// N members drawn uniformly inside the bounds, evaluated, unannotated.
inline Population random_population(const Problem& problem, std::size_t n, RngStream& rng)
{
    Population pop;
    pop.capacity = n;
    pop.members.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Individual ind;
        ind.x.resize(problem.dimension());
        for (std::size_t j = 0; j < ind.x.size(); ++j) {
            const auto& b = problem.bounds[j];
            ind.x[j] = b.clamp(rng.uniform(b.lower, b.upper));
        }
        ind.f = evaluate(problem, ind.x);
        pop.members.push_back(std::move(ind));
    }
    return pop;
}

/// Called with generation 0 and the merged random P1 + Q1, then once per
/// generation with the population that survived selection.
using GenerationObserver = std::function<void(std::size_t generation, const Population&)>;

/// Runs NSGA-II and returns the final parent population, fully annotated.
inline Population run(const Problem& problem, std::size_t capacity, std::size_t generations, CrowdingMode mode,
                      const VariationConfig& cfg, RngStream& rng, const GenerationObserver& observer = {})
{
    require(capacity >= 2, "run: population capacity must be at least 2");
    require(generations >= 1, "run: at least one generation required");
    cfg.validate();
    Population parents = random_population(problem, capacity, rng);
    Population offspring = random_population(problem, capacity, rng);
    for (std::size_t gen = 1; gen <= generations; ++gen) {
        Population merged = merge(std::move(parents), std::move(offspring));
        if (gen == 1 && observer) observer(0, merged);
        parents = environmental_select(std::move(merged), capacity, mode);
        if (observer) observer(gen, parents);
        if (gen < generations) offspring = make_offspring(parents, problem, cfg, rng);
    }
    return parents;
}

/// Objective vectors of the rank-0 members, in population order.
inline std::vector<ObjectiveVector> nondominated_set(const Population& pop)
{
    std::vector<ObjectiveVector> out;
    const bool annotated = std::all_of(pop.begin(), pop.end(), [](const auto& ind) { return ind.rank.has_value(); });
    if (annotated) {
        for (const auto& ind : pop) {
            if (*ind.rank == 0) out.push_back(ind.f);
        }
        return out;
    }
    const auto pts = objectives_of(pop);
    const auto part = fast_nondominated_sort(pts);
    auto first = part.fronts.front();
    std::sort(first.begin(), first.end());
    for (auto i : first) out.push_back(pts[i]);
    return out;
}

} // namespace moea
