#pragma once

// The acceptance suite: eight criteria covering oracle equivalence, the
// crowding geometry of both definitions, the directional experiment claims,
// determinism and indicator bounds. Shared by the acceptance test binary and
// `moea_bench verify`.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "moea/benchmarks.hpp"
#include "moea/harness.hpp"
#include "moea/indicators.hpp"
#include "moea/nsga2.hpp"
#include "moea/stats.hpp"
#include "moea/testing/oracles.hpp"

namespace moea::testing {

namespace fs = std::filesystem;

struct AcceptanceOptions {
    /// Fewer random instances and 10 paired runs instead of 20.
    bool quick = false;
    std::size_t jobs = 1;
    /// Scratch directory for experiment output; created if missing.
    fs::path workdir = fs::temp_directory_path() / "moea_acceptance";
    std::uint64_t seed = 20240607;
};

struct CriterionResult {
    int id;
    std::string name;
    bool passed;
    std::string detail;
};

// Thresholds, pinned.
inline constexpr double kIndicatorRelTol = 1e-9;
inline constexpr double kCoverageRatio = 1.2;
inline constexpr double kSignificance = 0.05;
inline constexpr double kSchGdMax = 1e-6;
inline constexpr double kZdt1GdMax = 5e-3;
inline constexpr double kGdRatioMax = 1.5;
inline constexpr double kSpRatioMax = 2.0;
inline constexpr double kM2RatioMin = 0.9;
/// Reference-front density for the SCH GD check. A 1000-point front leaves a
/// sampling floor near 2.5e-4 on GD; one million points brings it to ~2.5e-7.
inline constexpr std::size_t kSchFrontCount = 1'000'000;

namespace detail {

inline std::string fmt(const char* f, double a)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

inline bool rel_close(double a, double b, double tol)
{
    if (a == b) return true;
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

/// Random points on a coarse integer lattice mixed with continuous ones, so
/// ties and dominance chains both occur.
inline Points random_points(std::mt19937_64& gen, std::size_t n, std::size_t m, bool lattice)
{
    std::uniform_int_distribution<int> cell(0, 6);
    std::uniform_real_distribution<double> real(-1.0, 1.0);
    Points pts(n, ObjectiveVector(m));
    for (auto& p : pts)
        for (auto& v : p) v = lattice ? cell(gen) : real(gen);
    return pts;
}

} // namespace detail

inline CriterionResult criterion_sort_oracle(const AcceptanceOptions& opt)
{
    const std::size_t instances = opt.quick ? 200 : 1000;
    std::mt19937_64 gen(opt.seed);
    std::size_t mismatches = 0;
    for (std::size_t t = 0; t < instances; ++t) {
        const std::size_t n = 1 + gen() % 64;
        const std::size_t m = 2 + gen() % 2;
        const auto pts = detail::random_points(gen, n, m, t % 2 == 0);
        const auto part = fast_nondominated_sort(pts);
        const auto expect = peeling_sort(pts);
        bool same = part.fronts.size() == expect.size();
        for (std::size_t r = 0; same && r < expect.size(); ++r)
            same = std::set<std::size_t>(part.fronts[r].begin(), part.fronts[r].end()) == expect[r];
        mismatches += same ? 0 : 1;
    }
    return {1, "sort matches peeling oracle", mismatches == 0,
            std::to_string(instances - mismatches) + "/" + std::to_string(instances) + " instances identical"};
}

inline CriterionResult criterion_indicator_oracle(const AcceptanceOptions& opt)
{
    const std::size_t sets = opt.quick ? 50 : 200;
    std::mt19937_64 gen(opt.seed + 1);
    std::size_t bad = 0;
    std::string first_bad;
    const IndicatorConfig cfg{};
    for (std::size_t t = 0; t < sets; ++t) {
        const std::size_t n = 2 + gen() % 19;
        const std::size_t m = 2 + gen() % 2;
        const auto s = detail::random_points(gen, n, m, false);
        const auto s2 = detail::random_points(gen, 1 + gen() % 20, m, t % 3 == 0);
        const auto front = detail::random_points(gen, 1 + gen() % 20, m, false);
        IndicatorConfig q1 = cfg;
        q1.q = 1;
        const std::pair<double, double> checks[] = {
            {gd(s, front, cfg), oracle_gd(s, front, 2)},
            {gd(s, front, q1), oracle_gd(s, front, 1)},
            {coverage(s, s2), oracle_coverage(s, s2)},
            {coverage(s2, s), oracle_coverage(s2, s)},
            {spacing(s), oracle_spacing(s)},
            {niche_count(s, cfg), oracle_niche_count(s, cfg.sigma_fraction)},
        };
        for (const auto& [got, want] : checks) {
            if (!detail::rel_close(got, want, kIndicatorRelTol)) {
                if (bad++ == 0) first_bad = "set " + std::to_string(t) + ": " + detail::fmt("%.17g", got) + " vs " + detail::fmt("%.17g", want);
            }
        }
    }
    return {2, "indicators match brute-force oracles", bad == 0,
            bad == 0 ? std::to_string(sets) + " random sets, all four indicators within 1e-9 relative"
                     : std::to_string(bad) + " mismatches; first " + first_bad};
}

/// The box construction: A = (0,2), B = (2,0) and a probe P = (x,y).
inline std::vector<ObjectiveVector> box_front(double x, double y)
{
    return {{0.0, 2.0}, {2.0, 0.0}, {x, y}};
}

/// Crowding of the probe with raw objective gaps.
inline double box_probe_crowding(double x, double y, CrowdingMode mode)
{
    return crowding_distances(box_front(x, y), mode, Normalization::None)[2];
}

/// True when A and B are the probe's sort neighbours in both objectives.
/// Probes that duplicate A or B sort to a boundary slot instead.
inline bool box_probe_interior(double x, double y)
{
    const auto front = box_front(x, y);
    return objective_order(front, 0)[1] == 2 && objective_order(front, 1)[1] == 2;
}

inline CriterionResult criterion_crowding_geometry(const AcceptanceOptions&)
{
    bool ok = true;
    std::string detail;
    // Flat plane: every interior probe of the closed box scores 4.
    std::size_t interior = 0;
    for (int i = 0; i <= 20 && ok; ++i) {
        for (int j = 0; j <= 20 && ok; ++j) {
            if (!box_probe_interior(0.1 * i, 0.1 * j)) continue;
            ++interior;
            const double v = box_probe_crowding(0.1 * i, 0.1 * j, CrowdingMode::Initial);
            if (v != 4.0) {
                ok = false;
                detail = "initial mode at (" + detail::fmt("%.1f", 0.1 * i) + "," + detail::fmt("%.1f", 0.1 * j) + ") = " + detail::fmt("%.17g", v);
            }
        }
    }
    const double at_origin = box_probe_crowding(0.0, 0.0, CrowdingMode::Improved);
    const double at_far = box_probe_crowding(2.0, 2.0, CrowdingMode::Improved);
    if (ok && (at_origin != 4.0 || at_far != 0.0)) {
        ok = false;
        detail = "improved mode corners: (0,0) -> " + detail::fmt("%.17g", at_origin) + ", (2,2) -> " + detail::fmt("%.17g", at_far);
    }
    double prev = kInfinity;
    for (int i = 0; i <= 20 && ok; ++i) {
        const double v = box_probe_crowding(0.1 * i, 0.1 * i, CrowdingMode::Improved);
        if (!(v < prev)) {
            ok = false;
            detail = "improved mode not strictly decreasing at diagonal sample " + std::to_string(i);
        }
        prev = v;
    }
    if (ok) detail = "initial = 4 on all " + std::to_string(interior) + " interior probes of a 21x21 grid; improved = 4 at (0,0), 0 at (2,2), strictly decreasing over 21 diagonal samples";
    return {3, "crowding flat plane vs slope", ok, detail};
}

/// Experiment data shared by criteria 4 to 6 and 8.
struct ExperimentData {
    harness::ExperimentResult zdt;
    harness::ExperimentResult sch;
    std::size_t runs = 0;
};

inline ExperimentData run_protocol_experiments(const AcceptanceOptions& opt)
{
    ExperimentData data;
    data.runs = opt.quick ? 10 : 20;
    harness::ExperimentConfig cfg;
    cfg.experiment = "acceptance_zdt";
    cfg.problems = {ProblemId::ZDT1, ProblemId::ZDT2, ProblemId::ZDT3, ProblemId::ZDT6};
    cfg.runs = data.runs;
    cfg.base_seed = opt.seed;
    cfg.root = opt.workdir;
    cfg.jobs = opt.jobs;
    data.zdt = harness::run_experiment(cfg);

    cfg.experiment = "acceptance_sch";
    cfg.problems = {ProblemId::SCH};
    cfg.front_count = kSchFrontCount;
    data.sch = harness::run_experiment(cfg);
    return data;
}

inline std::vector<double> values_of(const harness::ExperimentResult& res, ProblemId id, CrowdingMode mode,
                                     double harness::RunRecord::*field)
{
    std::vector<double> out;
    for (const auto& r : res.runs) {
        if (r.problem == id && r.mode == mode) out.push_back(r.*field);
    }
    return out;
}

inline CriterionResult criterion_coverage_direction(const ExperimentData& data)
{
    bool ok = true;
    std::string detail;
    for (auto id : {ProblemId::ZDT1, ProblemId::ZDT2, ProblemId::ZDT3, ProblemId::ZDT6}) {
        std::vector<double> ci, cm;
        for (const auto& p : data.zdt.pairs) {
            if (p.problem != id) continue;
            ci.push_back(p.c_initial_improved);
            cm.push_back(p.c_improved_initial);
        }
        const double med_i = median(ci), med_m = median(cm);
        const auto test = sign_test(cm, ci);
        const bool row_ok = med_m > med_i && med_m > kCoverageRatio * med_i && test.p_value < kSignificance;
        ok = ok && row_ok;
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s%s C(imp,init)=%.4f C(init,imp)=%.4f wins %zu/%zu p=%.3g%s", detail.empty() ? "" : "; ",
                      std::string(problem_name(id)).c_str(), med_m, med_i, test.wins, test.wins + test.losses, test.p_value,
                      row_ok ? "" : " [FAIL]");
        detail += buf;
    }
    return {4, "C-metric favours improved crowding", ok, detail};
}

inline CriterionResult criterion_gd_convergence(const ExperimentData& data)
{
    using harness::RunRecord;
    bool ok = true;
    std::string detail;
    auto add = [&](const std::string& s, bool pass) {
        detail += (detail.empty() ? "" : "; ") + s + (pass ? "" : " [FAIL]");
        ok = ok && pass;
    };
    for (auto mode : {CrowdingMode::Initial, CrowdingMode::Improved}) {
        const double sch = median(values_of(data.sch, ProblemId::SCH, mode, &RunRecord::gd));
        add("SCH " + std::string(mode_name(mode)) + detail::fmt(" GD %.3g", sch), sch < kSchGdMax);
        const double z1 = median(values_of(data.zdt, ProblemId::ZDT1, mode, &RunRecord::gd));
        add("ZDT1 " + std::string(mode_name(mode)) + detail::fmt(" GD %.3g", z1), z1 < kZdt1GdMax);
    }
    int strictly_better = 0;
    for (auto id : {ProblemId::ZDT2, ProblemId::ZDT3, ProblemId::ZDT6}) {
        const double gi = median(values_of(data.zdt, id, CrowdingMode::Initial, &RunRecord::gd));
        const double gm = median(values_of(data.zdt, id, CrowdingMode::Improved, &RunRecord::gd));
        if (gm < gi) ++strictly_better;
        char buf[120];
        std::snprintf(buf, sizeof buf, "%s GD improved %.3g vs initial %.3g", std::string(problem_name(id)).c_str(), gm, gi);
        add(buf, gm <= kGdRatioMax * gi);
    }
    add("improved strictly smaller on " + std::to_string(strictly_better) + "/3", strictly_better >= 2);
    return {5, "GD convergence", ok, detail};
}

inline CriterionResult criterion_distribution(const ExperimentData& data)
{
    using harness::RunRecord;
    bool ok = true;
    std::string detail;
    for (auto id : {ProblemId::ZDT1, ProblemId::ZDT2, ProblemId::ZDT3}) {
        const double spi = median(values_of(data.zdt, id, CrowdingMode::Initial, &RunRecord::sp));
        const double spm = median(values_of(data.zdt, id, CrowdingMode::Improved, &RunRecord::sp));
        const double mi = median(values_of(data.zdt, id, CrowdingMode::Initial, &RunRecord::m2star));
        const double mm = median(values_of(data.zdt, id, CrowdingMode::Improved, &RunRecord::m2star));
        const bool row_ok = spm <= kSpRatioMax * spi && mm >= kM2RatioMin * mi;
        ok = ok && row_ok;
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s%s SP %.3g vs %.3g, M2* %.2f vs %.2f%s", detail.empty() ? "" : "; ",
                      std::string(problem_name(id)).c_str(), spm, spi, mm, mi, row_ok ? "" : " [FAIL]");
        detail += buf;
    }
    return {6, "distribution not degraded", ok, detail};
}

inline CriterionResult criterion_determinism(const AcceptanceOptions& opt)
{
    auto run_with = [&](std::size_t jobs) {
        harness::ExperimentConfig cfg;
        cfg.experiment = "determinism";
        cfg.problems = {ProblemId::ZDT1};
        cfg.runs = 3;
        cfg.base_seed = 42;
        cfg.jobs = jobs;
        cfg.root = opt.workdir / ("determinism_jobs" + std::to_string(jobs));
        fs::remove_all(cfg.root / "results");
        harness::run_experiment(cfg);
        return read_text_file(harness::records_path(cfg.root, cfg.experiment))
            + read_text_file(harness::pairs_path(cfg.root, cfg.experiment));
    };
    const auto one = run_with(1);
    const auto four = run_with(4);
    return {7, "records independent of --jobs", one == four,
            one == four ? "jobs=1 and jobs=4 produced byte-identical CSV records" : "CSV records differ between jobs=1 and jobs=4"};
}

inline CriterionResult criterion_bounds(const ExperimentData& data, const AcceptanceOptions& opt)
{
    bool ok = true;
    std::string detail;
    std::size_t checked = 0;
    for (const auto* res : {&data.zdt, &data.sch}) {
        for (const auto& r : res->runs) {
            ++checked;
            const double bound = static_cast<double>(r.set.size());
            if (!(r.m2star >= 0.0 && r.m2star <= bound)) {
                ok = false;
                detail = std::string(problem_name(r.problem)) + " run " + std::to_string(r.run) + " M2* out of [0,|S|]";
            }
        }
    }
    std::size_t fronts = 0;
    for (auto id : kAllProblems) {
        const auto rf = reference_front(id, 1000, opt.workdir);
        const double g = gd(rf.points, rf);
        ++fronts;
        if (g != 0.0) {
            ok = false;
            detail = std::string(problem_name(id)) + detail::fmt(" reference front GD = %.3g", g);
        }
    }
    if (ok) detail = "0 <= M2* <= |S| on " + std::to_string(checked) + " final sets; GD = 0 on " + std::to_string(fronts) + " reference fronts";
    return {8, "indicator bounds", ok, detail};
}

inline void print_result(std::ostream& out, const CriterionResult& r)
{
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name << ": " << r.detail << std::endl;
}

/// Runs all eight criteria in order, printing one line per criterion as it
/// completes.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream& out)
{
    fs::create_directories(opt.workdir);
    // Fronts are a pure function of (problem, count) and may be reused;
    // run records from an earlier build may not.
    fs::remove_all(opt.workdir / "results");
    std::vector<CriterionResult> results;
    auto record = [&](CriterionResult r) {
        print_result(out, r);
        results.push_back(std::move(r));
    };
    record(criterion_sort_oracle(opt));
    record(criterion_indicator_oracle(opt));
    record(criterion_crowding_geometry(opt));
    const auto data = run_protocol_experiments(opt);
    record(criterion_coverage_direction(data));
    record(criterion_gd_convergence(data));
    record(criterion_distribution(data));
    record(criterion_determinism(opt));
    record(criterion_bounds(data, opt));
    return results;
}

} // namespace moea::testing
