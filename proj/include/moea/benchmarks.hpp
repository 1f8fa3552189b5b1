#pragma once

// The nine classic two-objective test problems (SCH, FON, POL, KUR, ZDT1-4,
// ZDT6) and sampled reference fronts for indicator computation.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moea/core.hpp"
#include "moea/point_io.hpp"

namespace moea {

enum class ProblemId { SCH, FON, POL, KUR, ZDT1, ZDT2, ZDT3, ZDT4, ZDT6 };

inline constexpr std::array kAllProblems{
    ProblemId::SCH, ProblemId::FON, ProblemId::POL, ProblemId::KUR, ProblemId::ZDT1,
    ProblemId::ZDT2, ProblemId::ZDT3, ProblemId::ZDT4, ProblemId::ZDT6,
};

inline std::string_view problem_name(ProblemId id)
{
    switch (id) {
    case ProblemId::SCH: return "SCH";
    case ProblemId::FON: return "FON";
    case ProblemId::POL: return "POL";
    case ProblemId::KUR: return "KUR";
    case ProblemId::ZDT1: return "ZDT1";
    case ProblemId::ZDT2: return "ZDT2";
    case ProblemId::ZDT3: return "ZDT3";
    case ProblemId::ZDT4: return "ZDT4";
    case ProblemId::ZDT6: return "ZDT6";
    }
    return "?";
}

inline std::string lowercase(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

/// Case-insensitive lookup; throws ContractViolation for unknown names.
inline ProblemId parse_problem(std::string_view name)
{
    const auto wanted = lowercase(name);
    for (auto id : kAllProblems) {
        if (lowercase(problem_name(id)) == wanted) return id;
    }
    throw ContractViolation("unknown problem: " + std::string(name));
}

using ObjectiveMap = std::function<ObjectiveVector(std::span<const double>)>;

struct Problem {
    ProblemId id;
    std::string name;
    std::size_t m = 2;
    std::vector<Bounds> bounds;
    ObjectiveMap objectives;

    [[nodiscard]] std::size_t dimension() const noexcept { return bounds.size(); }

    [[nodiscard]] bool in_bounds(std::span<const double> x) const noexcept
    {
        if (x.size() != bounds.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!bounds[i].contains(x[i])) return false;
        }
        return true;
    }
};

/// Applies the problem's objective map. Out-of-bounds or wrong-length input
/// is a contract violation.
inline ObjectiveVector evaluate(const Problem& problem, std::span<const double> x)
{
    require(x.size() == problem.dimension(), "evaluate: decision vector length mismatch for " + problem.name);
    require(problem.in_bounds(x), "evaluate: decision vector out of bounds for " + problem.name);
    return problem.objectives(x);
}

namespace detail {

inline double zdt_tail_sum(std::span<const double> x)
{
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += x[i];
    return s;
}

inline ObjectiveVector sch(std::span<const double> x)
{
    return {x[0] * x[0], (x[0] - 2.0) * (x[0] - 2.0)};
}

inline ObjectiveVector fon(std::span<const double> x)
{
    const double c = 1.0 / std::sqrt(3.0);
    double s1 = 0.0, s2 = 0.0;
    for (double v : x) {
        s1 += (v - c) * (v - c);
        s2 += (v + c) * (v + c);
    }
    return {1.0 - std::exp(-s1), 1.0 - std::exp(-s2)};
}

inline ObjectiveVector pol(std::span<const double> x)
{
    const double a1 = 0.5 * std::sin(1.0) - 2.0 * std::cos(1.0) + std::sin(2.0) - 1.5 * std::cos(2.0);
    const double a2 = 1.5 * std::sin(1.0) - std::cos(1.0) + 2.0 * std::sin(2.0) - 0.5 * std::cos(2.0);
    const double b1 = 0.5 * std::sin(x[0]) - 2.0 * std::cos(x[0]) + std::sin(x[1]) - 1.5 * std::cos(x[1]);
    const double b2 = 1.5 * std::sin(x[0]) - std::cos(x[0]) + 2.0 * std::sin(x[1]) - 0.5 * std::cos(x[1]);
    return {1.0 + (a1 - b1) * (a1 - b1) + (a2 - b2) * (a2 - b2),
            (x[0] + 3.0) * (x[0] + 3.0) + (x[1] + 1.0) * (x[1] + 1.0)};
}

inline ObjectiveVector kur(std::span<const double> x)
{
    double f1 = 0.0, f2 = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        f1 += -10.0 * std::exp(-0.2 * std::sqrt(x[i] * x[i] + x[i + 1] * x[i + 1]));
    for (double v : x) f2 += std::pow(std::abs(v), 0.8) + 5.0 * std::sin(v * v * v);
    return {f1, f2};
}

inline ObjectiveVector zdt1(std::span<const double> x)
{
    const double g = 1.0 + 9.0 * zdt_tail_sum(x) / static_cast<double>(x.size() - 1);
    const double f1 = x[0];
    return {f1, g * (1.0 - std::sqrt(f1 / g))};
}

inline ObjectiveVector zdt2(std::span<const double> x)
{
    const double g = 1.0 + 9.0 * zdt_tail_sum(x) / static_cast<double>(x.size() - 1);
    const double f1 = x[0];
    return {f1, g * (1.0 - (f1 / g) * (f1 / g))};
}

inline ObjectiveVector zdt3(std::span<const double> x)
{
    const double g = 1.0 + 9.0 * zdt_tail_sum(x) / static_cast<double>(x.size() - 1);
    const double f1 = x[0];
    return {f1, g * (1.0 - std::sqrt(f1 / g) - (f1 / g) * std::sin(10.0 * std::numbers::pi * f1))};
}

inline ObjectiveVector zdt4(std::span<const double> x)
{
    double g = 1.0 + 10.0 * static_cast<double>(x.size() - 1);
    for (std::size_t i = 1; i < x.size(); ++i)
        g += x[i] * x[i] - 10.0 * std::cos(4.0 * std::numbers::pi * x[i]);
    const double f1 = x[0];
    return {f1, g * (1.0 - std::sqrt(f1 / g))};
}

inline double zdt6_f1(double x0)
{
    return 1.0 - std::exp(-4.0 * x0) * std::pow(std::sin(6.0 * std::numbers::pi * x0), 6);
}

inline ObjectiveVector zdt6(std::span<const double> x)
{
    const double g = 1.0 + 9.0 * std::pow(zdt_tail_sum(x) / static_cast<double>(x.size() - 1), 0.25);
    const double f1 = zdt6_f1(x[0]);
    return {f1, g * (1.0 - (f1 / g) * (f1 / g))};
}

} // namespace detail

inline Problem make_problem(ProblemId id)
{
    auto uniform = [](std::size_t n, double lo, double hi) { return std::vector<Bounds>(n, Bounds{lo, hi}); };
    Problem p{id, std::string(problem_name(id)), 2, {}, {}};
    switch (id) {
    case ProblemId::SCH:
        p.bounds = uniform(1, -1.0e3, 1.0e3);
        p.objectives = detail::sch;
        break;
    case ProblemId::FON:
        p.bounds = uniform(3, -4.0, 4.0);
        p.objectives = detail::fon;
        break;
    case ProblemId::POL:
        p.bounds = uniform(2, -std::numbers::pi, std::numbers::pi);
        p.objectives = detail::pol;
        break;
    case ProblemId::KUR:
        p.bounds = uniform(3, -5.0, 5.0);
        p.objectives = detail::kur;
        break;
    case ProblemId::ZDT1:
        p.bounds = uniform(30, 0.0, 1.0);
        p.objectives = detail::zdt1;
        break;
    case ProblemId::ZDT2:
        p.bounds = uniform(30, 0.0, 1.0);
        p.objectives = detail::zdt2;
        break;
    case ProblemId::ZDT3:
        p.bounds = uniform(30, 0.0, 1.0);
        p.objectives = detail::zdt3;
        break;
    case ProblemId::ZDT4:
        p.bounds = uniform(10, -5.0, 5.0);
        p.bounds[0] = Bounds{0.0, 1.0};
        p.objectives = detail::zdt4;
        break;
    case ProblemId::ZDT6:
        p.bounds = uniform(10, 0.0, 1.0);
        p.objectives = detail::zdt6;
        break;
    }
    return p;
}

inline Problem make_problem(std::string_view name) { return make_problem(parse_problem(name)); }

inline ObjectiveVector evaluate_problem(std::string_view name, std::span<const double> x)
{
    return evaluate(make_problem(name), x);
}

// ---------------------------------------------------------------------------
// Reference fronts

enum class FrontSource { Analytic, Generated };

struct ReferenceFront {
    ProblemId problem;
    FrontSource source;
    std::vector<ObjectiveVector> points;
};

/// Keeps the mutually non-dominated subset of a two-objective point set, in
/// ascending order of the first objective. Exact duplicates keep one copy.
inline std::vector<ObjectiveVector> nondominated_filter_2d(std::vector<ObjectiveVector> pts)
{
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
    });
    std::vector<ObjectiveVector> out;
    double best_f2 = kInfinity;
    for (auto& p : pts) {
        if (p[1] < best_f2) {
            best_f2 = p[1];
            out.push_back(std::move(p));
        }
    }
    return out;
}

/// Greedy farthest-point subsample: seeds with the two extremes, then keeps
/// adding the candidate farthest from everything chosen so far.
inline std::vector<ObjectiveVector> farthest_point_subsample(const std::vector<ObjectiveVector>& pts, std::size_t count)
{
    if (pts.size() <= count) return pts;
    auto dist2 = [](const ObjectiveVector& a, const ObjectiveVector& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
        return s;
    };
    std::vector<double> nearest(pts.size(), kInfinity);
    std::vector<bool> taken(pts.size(), false);
    std::vector<std::size_t> chosen;
    auto take = [&](std::size_t idx) {
        taken[idx] = true;
        chosen.push_back(idx);
        for (std::size_t i = 0; i < pts.size(); ++i) nearest[i] = std::min(nearest[i], dist2(pts[i], pts[idx]));
    };
    // pts is sorted by f1 (nondominated_filter_2d), so the ends are the extremes.
    take(0);
    if (count > 1) take(pts.size() - 1);
    while (chosen.size() < count) {
        std::size_t best = 0;
        double best_d = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (!taken[i] && nearest[i] > best_d) {
                best_d = nearest[i];
                best = i;
            }
        }
        take(best);
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<ObjectiveVector> out;
    out.reserve(chosen.size());
    for (auto idx : chosen) out.push_back(pts[idx]);
    return out;
}

namespace detail {

inline double golden_section_min(const std::function<double(double)>& f, double lo, double hi)
{
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        if (f(c) < f(d)) b = d; else a = c;
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    return 0.5 * (a + b);
}

/// f1 intervals of the disconnected ZDT3 front. Each segment ends at a local
/// minimum of h(f1) = 1 - sqrt(f1) - f1 sin(10 pi f1); the next segment
/// starts where h falls back to that value.
inline std::vector<std::array<double, 2>> zdt3_segments()
{
    auto h = [](double t) { return 1.0 - std::sqrt(t) - t * std::sin(10.0 * std::numbers::pi * t); };
    // One local minimum per period, inside the half where sin(10 pi t) > 0.
    std::array<double, 5> ends{};
    for (int j = 0; j < 5; ++j) ends[j] = golden_section_min(h, 0.2 * j, 0.2 * j + 0.1);
    std::vector<std::array<double, 2>> segs;
    double start = 0.0;
    for (int j = 0; j < 5; ++j) {
        segs.push_back({start, ends[j]});
        if (j == 4) break;
        // h climbs to a peak after ends[j] and then falls monotonically to
        // ends[j + 1]; the next segment starts where it drops below h(ends[j]).
        const double target = h(ends[j]);
        const double peak = golden_section_min([&](double t) { return -h(t); }, ends[j], ends[j + 1]);
        double a = peak, b = ends[j + 1];
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (h(mid) > target) a = mid; else b = mid;
        }
        start = b;
    }
    return segs;
}

inline double zdt6_min_f1()
{
    const double x = golden_section_min(zdt6_f1, 0.0, 1.0 / 6.0);
    return zdt6_f1(x);
}

struct Sample {
    ObjectiveVector f;
    std::vector<double> x;
};

/// nondominated_filter_2d for samples that keep their decision vectors.
inline std::vector<Sample> nondominated_samples(std::vector<Sample> v)
{
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        return a.f[0] != b.f[0] ? a.f[0] < b.f[0] : a.f[1] < b.f[1];
    });
    std::vector<Sample> out;
    double best_f2 = kInfinity;
    for (auto& s : v) {
        if (s.f[1] < best_f2) {
            best_f2 = s.f[1];
            out.push_back(std::move(s));
        }
    }
    return out;
}

/// Evaluates every point of a regular grid with `per_axis` points per
/// variable, centred on `centre` with half-width `half[i]` and clamped to the
/// bounds, and folds the survivors into `acc`.
inline void grid_samples(const Problem& p, const std::vector<double>& centre, const std::vector<double>& half,
                         std::size_t per_axis, std::vector<Sample>& acc)
{
    const std::size_t n = p.dimension();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= per_axis;
    std::vector<double> x(n);
    for (std::size_t c = 0; c < total; ++c) {
        std::size_t rem = c;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = rem % per_axis;
            rem /= per_axis;
            x[i] = p.bounds[i].clamp(centre[i] - half[i] + 2.0 * half[i] * static_cast<double>(k) / static_cast<double>(per_axis - 1));
        }
        acc.push_back({p.objectives(x), x});
        // Filter in chunks to bound memory.
        if (acc.size() >= 1u << 18) acc = nondominated_samples(std::move(acc));
    }
}

/// Front of a problem without a closed form. A regular grid of about
/// `samples` points is filtered to its non-dominated subset. When that
/// leaves fewer than `min_points`, refinement rounds re-grid a small box
/// around (at most 300 of) the current survivors, halving the box each round.
inline std::vector<ObjectiveVector> sampled_front(const Problem& p, std::size_t samples, std::size_t min_points)
{
    const std::size_t n = p.dimension();
    const auto per_axis = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(samples), 1.0 / static_cast<double>(n))));
    std::vector<double> centre(n), half(n), step(n);
    for (std::size_t i = 0; i < n; ++i) {
        centre[i] = 0.5 * (p.bounds[i].lower + p.bounds[i].upper);
        half[i] = 0.5 * p.bounds[i].width();
        step[i] = p.bounds[i].width() / static_cast<double>(per_axis - 1);
    }
    std::vector<Sample> front;
    grid_samples(p, centre, half, per_axis, front);
    front = nondominated_samples(std::move(front));

    constexpr std::size_t kMaxCentres = 300;
    constexpr std::size_t kLocalPerAxis = 11;
    for (int round = 0; round < 8 && front.size() < min_points; ++round) {
        std::vector<Sample> centres;
        if (front.size() <= kMaxCentres) {
            centres = front;
        } else {
            for (std::size_t i = 0; i < kMaxCentres; ++i) centres.push_back(front[i * (front.size() - 1) / (kMaxCentres - 1)]);
        }
        std::vector<Sample> acc = front;
        for (const auto& c : centres) grid_samples(p, c.x, step, kLocalPerAxis, acc);
        front = nondominated_samples(std::move(acc));
        for (auto& h : step) h *= 0.5;
    }
    std::vector<ObjectiveVector> out;
    out.reserve(front.size());
    for (auto& s : front) out.push_back(std::move(s.f));
    return out;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t count)
{
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return v;
}

} // namespace detail

/// Number of decision-space samples used for the POL and KUR fronts.
inline constexpr std::size_t kGridSamples = 1'000'000;

/// Samples `count` points of the true front. Analytic fronts use evenly
/// spaced parameters; POL and KUR come from a dense grid (locally refined
/// when it is too coarse), non-dominated filtering and farthest-point
/// downsampling.
inline ReferenceFront generate_reference_front(ProblemId id, std::size_t count)
{
    require(count >= 2, "reference_front: count must be at least 2");
    ReferenceFront rf{id, FrontSource::Analytic, {}};
    auto& pts = rf.points;
    pts.reserve(count);
    switch (id) {
    case ProblemId::SCH:
        for (double x : detail::linspace(0.0, 2.0, count)) pts.push_back({x * x, (x - 2.0) * (x - 2.0)});
        break;
    case ProblemId::FON: {
        const double c = 1.0 / std::sqrt(3.0);
        for (double t : detail::linspace(-c, c, count)) {
            const std::array<double, 3> x{t, t, t};
            pts.push_back(detail::fon(x));
        }
        break;
    }
    case ProblemId::ZDT1:
    case ProblemId::ZDT4:
        for (double f1 : detail::linspace(0.0, 1.0, count)) pts.push_back({f1, 1.0 - std::sqrt(f1)});
        break;
    case ProblemId::ZDT2:
        for (double f1 : detail::linspace(0.0, 1.0, count)) pts.push_back({f1, 1.0 - f1 * f1});
        break;
    case ProblemId::ZDT3: {
        const auto segs = detail::zdt3_segments();
        double total = 0.0;
        for (const auto& s : segs) total += s[1] - s[0];
        // Spread `count` parameters evenly over the concatenated segments.
        for (double t : detail::linspace(0.0, total, count)) {
            double f1 = segs.back()[1];
            for (const auto& s : segs) {
                const double len = s[1] - s[0];
                if (t <= len) {
                    f1 = s[0] + t;
                    break;
                }
                t -= len;
            }
            pts.push_back({f1, 1.0 - std::sqrt(f1) - f1 * std::sin(10.0 * std::numbers::pi * f1)});
        }
        pts = nondominated_filter_2d(std::move(pts));
        break;
    }
    case ProblemId::ZDT6:
        for (double f1 : detail::linspace(detail::zdt6_min_f1(), 1.0, count)) pts.push_back({f1, 1.0 - f1 * f1});
        break;
    case ProblemId::POL:
    case ProblemId::KUR:
        rf.source = FrontSource::Generated;
        pts = farthest_point_subsample(detail::sampled_front(make_problem(id), kGridSamples, 4 * count), count);
        break;
    }
    return rf;
}

inline std::filesystem::path front_file_path(const std::filesystem::path& root, ProblemId id, std::size_t count)
{
    return root / "fronts" / (lowercase(problem_name(id)) + "_" + std::to_string(count) + ".front");
}

/// Loads `<root>/fronts/<problem>_<count>.front` when present; otherwise
/// generates the front and writes the file. Without a root nothing touches
/// the filesystem.
inline ReferenceFront reference_front(ProblemId id, std::size_t count,
                                      const std::optional<std::filesystem::path>& root = std::nullopt)
{
    if (!root) return generate_reference_front(id, count);
    const auto path = front_file_path(*root, id, count);
    const bool generated = id == ProblemId::POL || id == ProblemId::KUR;
    if (std::filesystem::exists(path)) {
        return ReferenceFront{id, generated ? FrontSource::Generated : FrontSource::Analytic, read_points(path)};
    }
    auto rf = generate_reference_front(id, count);
    write_points(path, rf.points);
    // Reload so the in-memory front is exactly what later calls will read.
    rf.points = read_points(path);
    return rf;
}

inline ReferenceFront reference_front(std::string_view name, std::size_t count,
                                      const std::optional<std::filesystem::path>& root = std::nullopt)
{
    return reference_front(parse_problem(name), count, root);
}

} // namespace moea
