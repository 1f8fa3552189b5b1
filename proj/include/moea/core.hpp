#pragma once

// Domain types, Pareto dominance and the seeded random stream shared by the
// whole library. Everything here assumes minimization.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace moea {

using DecisionVector = std::vector<double>;
using ObjectiveVector = std::vector<double>;

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const std::string& what)
{
    if (!condition) throw ContractViolation(what);
}

struct Bounds {
    double lower;
    double upper;

    [[nodiscard]] bool contains(double v) const noexcept { return v >= lower && v <= upper; }
    [[nodiscard]] double width() const noexcept { return upper - lower; }
    [[nodiscard]] double clamp(double v) const noexcept { return v < lower ? lower : (v > upper ? upper : v); }
};

struct Individual {
    DecisionVector x;
    ObjectiveVector f;
    std::optional<std::size_t> rank;
    std::optional<double> crowding;

    [[nodiscard]] bool annotated() const noexcept { return rank.has_value() && crowding.has_value(); }
};

struct Population {
    std::vector<Individual> members;
    std::size_t capacity = 0;

    [[nodiscard]] std::size_t size() const noexcept { return members.size(); }
    [[nodiscard]] bool empty() const noexcept { return members.empty(); }
    Individual& operator[](std::size_t i) { return members[i]; }
    const Individual& operator[](std::size_t i) const { return members[i]; }
    auto begin() noexcept { return members.begin(); }
    auto end() noexcept { return members.end(); }
    auto begin() const noexcept { return members.begin(); }
    auto end() const noexcept { return members.end(); }
};

/// True iff a is no worse than b everywhere and strictly better somewhere.
/// Exact floating comparison, no epsilon.
inline bool dominates(std::span<const double> a, std::span<const double> b)
{
    require(a.size() == b.size(), "dominates: objective vectors differ in length");
    bool strictly_better = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) strictly_better = true;
    }
    return strictly_better;
}

/// Componentwise a <= b. Reflexive.
inline bool weakly_dominates(std::span<const double> a, std::span<const double> b)
{
    require(a.size() == b.size(), "weakly_dominates: objective vectors differ in length");
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
    }
    return true;
}

/// Seedable 64-bit Mersenne Twister with hand-rolled draws so that a given
/// seed yields the same sequence on every standard library.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer on [0, n). Rejection sampling keeps it unbiased.
    std::size_t uniform_index(std::size_t n)
    {
        require(n > 0, "uniform_index: empty range");
        const std::uint64_t range = n;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()
            - std::numeric_limits<std::uint64_t>::max() % range;
        std::uint64_t draw = engine_();
        while (draw >= limit) draw = engine_();
        return static_cast<std::size_t>(draw % range);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Independent child stream; used when one run needs to hand out
    /// sub-streams without disturbing its own sequence.
    RngStream split() { return RngStream(splitmix(engine_())); }

    /// Seed for run `run_index` of an experiment. Paired modes share it.
    static std::uint64_t run_seed(std::uint64_t base_seed, std::size_t run_index) noexcept
    {
        return base_seed + static_cast<std::uint64_t>(run_index);
    }

private:
    static std::uint64_t splitmix(std::uint64_t z) noexcept
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

} // namespace moea
