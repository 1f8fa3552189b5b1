#pragma once

// Mating selection and variation: k-way tournament, convex crossover and
// polynomial mutation.

#include <cmath>
#include <utility>
#include <vector>

#include "moea/benchmarks.hpp"
#include "moea/core.hpp"

namespace moea {

/// How a tournament picks its winner among the drawn candidates.
enum class TournamentRule {
    CrowdedComparison, ///< lower rank, then larger crowding, then uniform
    Uniform,           ///< ignore rank and crowding
};

/// Length the polynomial step is multiplied by.
enum class MutationScaling {
    VariableRange,   ///< x' = x + delta (upper - lower), then clamped
    DistanceToBound, ///< x' = x + delta (x - lower) below u = 0.5, x + delta (upper - x) above
};

struct VariationConfig {
    double p_crossover = 0.9;
    /// Per-variable gate: each variable is mutated independently with this probability.
    double p_mutation = 0.1;
    std::size_t tournament_k = 2;
    double eta_m = 20.0;
    TournamentRule tournament_rule = TournamentRule::CrowdedComparison;
    MutationScaling mutation_scaling = MutationScaling::VariableRange;

    void validate() const
    {
        require(p_crossover >= 0.0 && p_crossover <= 1.0, "p_crossover must lie in [0,1]");
        require(p_mutation >= 0.0 && p_mutation <= 1.0, "p_mutation must lie in [0,1]");
        require(tournament_k >= 2, "tournament_k must be at least 2");
        require(eta_m > 0.0, "eta_m must be positive");
    }
};

/// Crowded comparison: a beats b on lower rank, or equal rank and larger crowding.
inline bool crowded_better(const Individual& a, const Individual& b)
{
    if (*a.rank != *b.rank) return *a.rank < *b.rank;
    return *a.crowding > *b.crowding;
}

inline const Individual& tournament_select(const Population& pop, const VariationConfig& cfg, RngStream& rng)
{
    require(pop.size() >= cfg.tournament_k, "tournament_select: population smaller than tournament size");
    for (const auto& ind : pop) require(ind.annotated(), "tournament_select: population lacks rank/crowding annotations");

    // k distinct members by partial Fisher-Yates over an index list.
    std::vector<std::size_t> idx(pop.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < cfg.tournament_k; ++i) {
        const std::size_t j = i + rng.uniform_index(idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(cfg.tournament_k);

    if (cfg.tournament_rule == TournamentRule::Uniform) return pop[idx[rng.uniform_index(idx.size())]];

    std::vector<std::size_t> best{idx[0]};
    for (std::size_t i = 1; i < idx.size(); ++i) {
        const auto& cand = pop[idx[i]];
        const auto& lead = pop[best.front()];
        if (crowded_better(cand, lead)) {
            best.assign(1, idx[i]);
        } else if (!crowded_better(lead, cand)) {
            best.push_back(idx[i]);
        }
    }
    if (best.size() == 1) return pop[best.front()];
    return pop[best[rng.uniform_index(best.size())]];
}

/// c1 = lambda p1 + (1 - lambda) p2 and c2 = (1 - lambda) p1 + lambda p2,
/// with one lambda per variable.
inline std::pair<DecisionVector, DecisionVector> convex_combine(std::span<const double> p1, std::span<const double> p2,
                                                               std::span<const double> lambdas)
{
    require(p1.size() == p2.size(), "convex_crossover: parent lengths differ");
    require(lambdas.size() == p1.size(), "convex_crossover: one lambda per variable required");
    DecisionVector c1(p1.size()), c2(p1.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
        const double l = lambdas[i];
        c1[i] = l * p1[i] + (1.0 - l) * p2[i];
        c2[i] = (1.0 - l) * p1[i] + l * p2[i];
    }
    return {std::move(c1), std::move(c2)};
}

inline std::pair<DecisionVector, DecisionVector> convex_crossover(std::span<const double> p1, std::span<const double> p2,
                                                                 const VariationConfig& cfg, RngStream& rng)
{
    require(p1.size() == p2.size(), "convex_crossover: parent lengths differ");
    if (!rng.bernoulli(cfg.p_crossover))
        return {DecisionVector(p1.begin(), p1.end()), DecisionVector(p2.begin(), p2.end())};
    std::vector<double> lambdas(p1.size());
    for (auto& l : lambdas) l = rng.uniform01();
    return convex_combine(p1, p2, lambdas);
}

/// Polynomial perturbation of one variable for a uniform draw u in [0,1).
/// delta = (2u)^(1/(eta+1)) - 1 below u = 0.5 and 1 - (2(1-u))^(1/(eta+1))
/// above, so u = 0.5 leaves x unchanged. The result is clamped to the bounds.
inline double polynomial_perturb(double x, Bounds b, double u, double eta_m,
                                 MutationScaling scaling = MutationScaling::VariableRange)
{
    if (b.width() <= 0.0) return x;
    const double exponent = 1.0 / (eta_m + 1.0);
    const double delta = u < 0.5 ? std::pow(2.0 * u, exponent) - 1.0 : 1.0 - std::pow(2.0 * (1.0 - u), exponent);
    double span = b.width();
    if (scaling == MutationScaling::DistanceToBound) span = u < 0.5 ? x - b.lower : b.upper - x;
    return b.clamp(x + delta * span);
}

inline DecisionVector polynomial_mutation(std::span<const double> x, std::span<const Bounds> bounds,
                                          const VariationConfig& cfg, RngStream& rng)
{
    require(x.size() == bounds.size(), "polynomial_mutation: bounds length mismatch");
    DecisionVector y(x.begin(), x.end());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!rng.bernoulli(cfg.p_mutation)) continue;
        y[i] = polynomial_perturb(y[i], bounds[i], rng.uniform01(), cfg.eta_m, cfg.mutation_scaling);
    }
    return y;
}

/// Builds N children: two tournaments, crossover, mutation of both children,
/// evaluation. The surplus child is dropped when N is odd.
inline Population make_offspring(const Population& pop, const Problem& problem, const VariationConfig& cfg, RngStream& rng)
{
    cfg.validate();
    const std::size_t n = pop.capacity != 0 ? pop.capacity : pop.size();
    Population out;
    out.capacity = n;
    out.members.reserve(n + 1);
    auto add_child = [&](DecisionVector x) {
        // Convex mixing can overshoot a bound by an ulp; project back.
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = problem.bounds[i].clamp(x[i]);
        Individual child;
        child.f = evaluate(problem, x);
        child.x = std::move(x);
        out.members.push_back(std::move(child));
    };
    while (out.size() < n) {
        const auto& a = tournament_select(pop, cfg, rng);
        const auto& b = tournament_select(pop, cfg, rng);
        auto [c1, c2] = convex_crossover(a.x, b.x, cfg, rng);
        auto m1 = polynomial_mutation(c1, problem.bounds, cfg, rng);
        auto m2 = polynomial_mutation(c2, problem.bounds, cfg, rng);
        add_child(std::move(m1));
        if (out.size() < n) add_child(std::move(m2));
    }
    return out;
}

} // namespace moea
