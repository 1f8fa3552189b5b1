#pragma once

// Paired experiment runner: for every problem and run index, one seeded
// NSGA-II run per crowding mode from the same initial population, indicator
// computation on the final non-dominated sets, persistence and summaries.
//
// Layout under the output root:
//   fronts/<problem>_<count>.front
//   results/<experiment>.csv            problem,mode,run,seed,gd,sp,m2star
//   results/<experiment>.pairs.csv      problem,run,seed,c_initial_improved,c_improved_initial
//   results/<experiment>.timing.csv     problem,mode,run,duration_ms (append-only)
//   results/<experiment>/<problem>_<mode>_<run>.set

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "moea/benchmarks.hpp"
#include "moea/indicators.hpp"
#include "moea/nsga2.hpp"
#include "moea/operators.hpp"
#include "moea/point_io.hpp"
#include "moea/stats.hpp"

namespace moea::harness {

namespace fs = std::filesystem;

struct ExperimentConfig {
    std::string experiment = "default";
    std::vector<ProblemId> problems{kAllProblems.begin(), kAllProblems.end()};
    std::vector<CrowdingMode> modes{CrowdingMode::Initial, CrowdingMode::Improved};
    std::size_t runs = 50;
    std::size_t pop = 50;
    std::size_t generations = 600;
    std::uint64_t base_seed = 1;
    VariationConfig variation;
    IndicatorConfig indicators;
    std::size_t front_count = 1000;
    fs::path root = ".";
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());

    void validate() const
    {
        require(!experiment.empty() && experiment.find('/') == std::string::npos, "experiment name must be a plain file name");
        require(!problems.empty(), "at least one problem required");
        require(!modes.empty(), "at least one crowding mode required");
        require(runs >= 1, "runs must be at least 1");
        require(pop >= 4, "pop must be at least 4");
        require(generations >= 1, "gens must be at least 1");
        require(front_count >= 1000, "front-count must be at least 1000");
        require(jobs >= 1, "jobs must be at least 1");
        variation.validate();
        indicators.validate();
    }
};

namespace detail {

inline std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value)
{
    std::istringstream in(value);
    T out{};
    in >> out;
    if (in.fail() || !in.eof()) throw ContractViolation("invalid value for " + key + ": " + value);
    return out;
}

inline std::vector<std::string> split_list(const std::string& value)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace detail

/// Applies one `key = value` setting. Keys match the CLI flag names.
/// `problem` and `mode` replace the current selection; `problem` takes a
/// comma-separated list, `mode` one of initial, improved, both.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value)
{
    using detail::parse_number;
    if (key == "experiment") {
        cfg.experiment = value;
    } else if (key == "problem") {
        cfg.problems.clear();
        for (const auto& name : detail::split_list(value)) cfg.problems.push_back(parse_problem(name));
    } else if (key == "mode") {
        const auto v = lowercase(value);
        if (v == "both") cfg.modes = {CrowdingMode::Initial, CrowdingMode::Improved};
        else cfg.modes = {parse_mode(v)};
    } else if (key == "runs") {
        cfg.runs = parse_number<std::size_t>(key, value);
    } else if (key == "pop") {
        cfg.pop = parse_number<std::size_t>(key, value);
    } else if (key == "gens") {
        cfg.generations = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
        cfg.base_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "eta-m") {
        cfg.variation.eta_m = parse_number<double>(key, value);
    } else if (key == "pc") {
        cfg.variation.p_crossover = parse_number<double>(key, value);
    } else if (key == "pm") {
        cfg.variation.p_mutation = parse_number<double>(key, value);
    } else if (key == "q") {
        cfg.indicators.q = parse_number<int>(key, value);
    } else if (key == "sigma-fraction") {
        cfg.indicators.sigma_fraction = parse_number<double>(key, value);
    } else if (key == "front-count") {
        cfg.front_count = parse_number<std::size_t>(key, value);
    } else if (key == "out") {
        cfg.root = value;
    } else if (key == "jobs") {
        cfg.jobs = parse_number<std::size_t>(key, value);
    } else {
        throw ContractViolation("unknown configuration key: " + key);
    }
}

/// Parses flat `key = value` lines; `#` starts a comment.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ContractViolation("config line " + std::to_string(lineno) + ": expected key = value");
        out.emplace_back(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return out;
}

inline void apply_config_file(ExperimentConfig& cfg, const fs::path& path)
{
    for (const auto& [k, v] : parse_config_text(read_text_file(path))) apply_setting(cfg, k, v);
}

// ---------------------------------------------------------------------------

struct RunRecord {
    ProblemId problem;
    CrowdingMode mode;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    SolutionSet set;
    double gd = 0.0;
    double sp = 0.0;
    double m2star = 0.0;
    /// Wall clock of the run; NaN when the record was restored from disk.
    double duration_ms = std::numeric_limits<double>::quiet_NaN();
};

struct PairedRecord {
    ProblemId problem;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    double c_initial_improved = 0.0; ///< C(S_initial, S_improved)
    double c_improved_initial = 0.0; ///< C(S_improved, S_initial)
};

struct ExperimentResult {
    std::vector<RunRecord> runs;
    std::vector<PairedRecord> pairs;
};

inline fs::path results_dir(const fs::path& root) { return root / "results"; }
inline fs::path records_path(const fs::path& root, const std::string& exp) { return results_dir(root) / (exp + ".csv"); }
inline fs::path pairs_path(const fs::path& root, const std::string& exp) { return results_dir(root) / (exp + ".pairs.csv"); }
inline fs::path timing_path(const fs::path& root, const std::string& exp) { return results_dir(root) / (exp + ".timing.csv"); }

inline fs::path set_path(const fs::path& root, const std::string& exp, ProblemId id, CrowdingMode mode, std::size_t run)
{
    return results_dir(root) / exp / (lowercase(problem_name(id)) + "_" + std::string(mode_name(mode)) + "_" + std::to_string(run) + ".set");
}

inline constexpr const char* kRecordsHeader = "problem,mode,run,seed,gd,sp,m2star";
inline constexpr const char* kPairsHeader = "problem,run,seed,c_initial_improved,c_improved_initial";

/// Fills gd, sp and m2star from the record's solution set. Sets with fewer
/// than two points get NaN spacing and niche count.
inline void compute_indicators(RunRecord& rec, const NearestPointIndex& front, const IndicatorConfig& cfg)
{
    rec.gd = gd(rec.set, front, cfg);
    if (rec.set.size() >= 2) {
        rec.sp = spacing(rec.set);
        rec.m2star = niche_count(rec.set, cfg);
    } else {
        rec.sp = rec.m2star = std::numeric_limits<double>::quiet_NaN();
    }
}

/// One NSGA-II run. The seed depends only on the run index, so both modes
/// start from the same P1 and Q1.
inline RunRecord execute_run(const ExperimentConfig& cfg, const Problem& problem, CrowdingMode mode, std::size_t run_index)
{
    RunRecord rec{problem.id, mode, run_index, RngStream::run_seed(cfg.base_seed, run_index), {}, 0, 0, 0};
    RngStream rng(rec.seed);
    const auto start = std::chrono::steady_clock::now();
    const auto final_pop = run(problem, cfg.pop, cfg.generations, mode, cfg.variation, rng);
    rec.set = nondominated_set(final_pop);
    rec.duration_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

inline std::string format_records_csv(const std::vector<RunRecord>& runs)
{
    std::string out = std::string(kRecordsHeader) + "\n";
    for (const auto& r : runs) {
        out += std::string(problem_name(r.problem)) + "," + std::string(mode_name(r.mode)) + "," + std::to_string(r.run) + ","
            + std::to_string(r.seed) + "," + format_real(r.gd) + "," + format_real(r.sp) + "," + format_real(r.m2star) + "\n";
    }
    return out;
}

inline std::string format_pairs_csv(const std::vector<PairedRecord>& pairs)
{
    std::string out = std::string(kPairsHeader) + "\n";
    for (const auto& p : pairs) {
        out += std::string(problem_name(p.problem)) + "," + std::to_string(p.run) + "," + std::to_string(p.seed) + ","
            + format_real(p.c_initial_improved) + "," + format_real(p.c_improved_initial) + "\n";
    }
    return out;
}

/// Serializes result writing from worker threads.
class Collector {
public:
    Collector(fs::path root, std::string experiment) : root_(std::move(root)), experiment_(std::move(experiment)) {}

    void completed(const RunRecord& rec)
    {
        std::lock_guard lock(mutex_);
        write_points(set_path(root_, experiment_, rec.problem, rec.mode, rec.run), rec.set);
        const auto path = timing_path(root_, experiment_);
        const bool fresh = !fs::exists(path);
        std::ofstream out(path, std::ios::app | std::ios::binary);
        if (!out) throw IoError("cannot append to", path);
        if (fresh) out << "problem,mode,run,duration_ms\n";
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.3f", rec.duration_ms);
        out << problem_name(rec.problem) << ',' << mode_name(rec.mode) << ',' << rec.run << ',' << ms << '\n';
    }

private:
    fs::path root_;
    std::string experiment_;
    std::mutex mutex_;
};

/// Writes `content` unless the file already holds exactly that.
inline void write_if_changed(const fs::path& path, const std::string& content)
{
    if (fs::exists(path) && read_text_file(path) == content) return;
    write_text_file_atomic(path, content);
}

/// Runs every (problem, run, mode) task on a pool of `cfg.jobs` workers.
/// Tasks whose solution-set file already exists are restored instead of
/// rerun. Record files are written in a fixed order (problem, run, mode) so
/// their bytes do not depend on the degree of parallelism.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    fs::create_directories(results_dir(cfg.root) / cfg.experiment);

    struct Task {
        std::size_t problem_slot;
        CrowdingMode mode;
        std::size_t run;
    };
    std::vector<Problem> problems;
    std::vector<NearestPointIndex> fronts;
    for (auto id : cfg.problems) {
        problems.push_back(make_problem(id));
        fronts.emplace_back(reference_front(id, cfg.front_count, cfg.root).points);
    }
    std::vector<Task> tasks;
    for (std::size_t p = 0; p < problems.size(); ++p) {
        for (std::size_t r = 0; r < cfg.runs; ++r) {
            for (auto mode : cfg.modes) tasks.push_back({p, mode, r});
        }
    }

    std::vector<RunRecord> records(tasks.size());
    Collector collector(cfg.root, cfg.experiment);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                const auto& t = tasks[i];
                const auto& problem = problems[t.problem_slot];
                const auto path = set_path(cfg.root, cfg.experiment, problem.id, t.mode, t.run);
                RunRecord rec;
                if (fs::exists(path)) {
                    rec = RunRecord{problem.id, t.mode, t.run, RngStream::run_seed(cfg.base_seed, t.run), read_points(path), 0, 0, 0};
                } else {
                    rec = execute_run(cfg, problem, t.mode, t.run);
                    // Indicators are computed on the persisted values so that
                    // a restored record reproduces them exactly.
                    rec.set = parse_points(format_points(rec.set));
                    collector.completed(rec);
                }
                compute_indicators(rec, fronts[t.problem_slot], cfg.indicators);
                records[i] = std::move(rec);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next = tasks.size();
            }
        }
    };
    const std::size_t workers = std::min(cfg.jobs, tasks.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (first_error) std::rethrow_exception(first_error);

    ExperimentResult result;
    result.runs = std::move(records);
    const bool paired = cfg.modes.size() == 2;
    for (std::size_t i = 0; paired && i + 1 < result.runs.size(); i += 2) {
        const auto& a = result.runs[i];
        const auto& b = result.runs[i + 1];
        const auto& init = a.mode == CrowdingMode::Initial ? a : b;
        const auto& impr = a.mode == CrowdingMode::Initial ? b : a;
        result.pairs.push_back({a.problem, a.run, a.seed, coverage(init.set, impr.set), coverage(impr.set, init.set)});
    }
    write_if_changed(records_path(cfg.root, cfg.experiment), format_records_csv(result.runs));
    if (paired) write_if_changed(pairs_path(cfg.root, cfg.experiment), format_pairs_csv(result.pairs));
    return result;
}

// ---------------------------------------------------------------------------
// Reading records back

namespace detail {

inline std::vector<std::vector<std::string>> read_csv_rows(const fs::path& path, const std::string& header)
{
    const auto text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != header) throw IoError("unexpected CSV header in", path);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

inline double parse_real(const std::string& s)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw std::runtime_error("malformed number in records: " + s);
    return v;
}

} // namespace detail

/// Loads run records (without solution sets) from `results/<experiment>.csv`.
inline std::vector<RunRecord> read_records(const fs::path& path)
{
    std::vector<RunRecord> out;
    for (const auto& c : detail::read_csv_rows(path, kRecordsHeader)) {
        if (c.size() != 7) throw IoError("malformed record row in", path);
        RunRecord r{parse_problem(c[0]), parse_mode(c[1]), std::stoul(c[2]), std::stoull(c[3]), {},
                    detail::parse_real(c[4]), detail::parse_real(c[5]), detail::parse_real(c[6])};
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<PairedRecord> read_pairs(const fs::path& path)
{
    std::vector<PairedRecord> out;
    for (const auto& c : detail::read_csv_rows(path, kPairsHeader)) {
        if (c.size() != 5) throw IoError("malformed pair row in", path);
        out.push_back({parse_problem(c[0]), std::stoul(c[1]), std::stoull(c[2]), detail::parse_real(c[3]), detail::parse_real(c[4])});
    }
    return out;
}

/// Collects every experiment under `<root>/results`, or only `experiment`
/// when given.
inline ExperimentResult load_results(const fs::path& root, const std::optional<std::string>& experiment = std::nullopt)
{
    ExperimentResult res;
    const auto dir = results_dir(root);
    if (!fs::is_directory(dir)) return res;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
        if (name.ends_with(".pairs.csv") || name.ends_with(".timing.csv")) continue;
        if (experiment && name != *experiment + ".csv") continue;
        files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto runs = read_records(f);
        res.runs.insert(res.runs.end(), runs.begin(), runs.end());
        const auto stem = f.stem().string();
        if (const auto pp = pairs_path(root, stem); fs::exists(pp)) {
            auto pairs = read_pairs(pp);
            res.pairs.insert(res.pairs.end(), pairs.begin(), pairs.end());
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Summaries

struct Summary {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double median = std::numeric_limits<double>::quiet_NaN();
    std::size_t count = 0;
};

inline Summary summarize_values(const std::vector<double>& v)
{
    std::vector<double> finite;
    for (double x : v) {
        if (std::isfinite(x)) finite.push_back(x);
    }
    return {mean(finite), median(finite), finite.size()};
}

enum class Better { Lower, Higher };

/// One problem's row of a per-mode indicator table.
struct IndicatorRow {
    ProblemId problem;
    Summary initial;
    Summary improved;
    /// Which mode has the better median: "improved", "initial", "tie" or "n/a".
    std::string direction;
    SignTest test; ///< wins = runs where improved is better
};

struct CoverageRow {
    ProblemId problem;
    Summary c_initial_improved;
    Summary c_improved_initial;
    std::string direction;
    SignTest test; ///< wins = runs with C(improved, initial) > C(initial, improved)
};

struct Report {
    std::vector<IndicatorRow> gd;
    std::vector<CoverageRow> coverage;
    std::vector<IndicatorRow> sp;
    std::vector<IndicatorRow> m2star;
};

namespace detail {

inline std::string direction_of(const Summary& initial, const Summary& improved, Better better)
{
    if (initial.count == 0 || improved.count == 0) return "n/a";
    if (initial.median == improved.median) return "tie";
    const bool improved_wins = better == Better::Lower ? improved.median < initial.median : improved.median > initial.median;
    return improved_wins ? "improved" : "initial";
}

} // namespace detail

/// Per problem and mode: mean and median of GD, SP and M2*. Per problem:
/// C in both directions. Each comparison carries a paired sign test over
/// runs present in both modes.
inline Report summarize(const ExperimentResult& res)
{
    Report report;
    std::vector<ProblemId> order;
    for (const auto& r : res.runs) {
        if (std::find(order.begin(), order.end(), r.problem) == order.end()) order.push_back(r.problem);
    }
    for (const auto& p : res.pairs) {
        if (std::find(order.begin(), order.end(), p.problem) == order.end()) order.push_back(p.problem);
    }

    auto indicator_row = [&](ProblemId id, double RunRecord::*field, Better better) {
        std::vector<double> vi, vm;
        std::map<std::size_t, double> by_run_i, by_run_m;
        for (const auto& r : res.runs) {
            if (r.problem != id) continue;
            (r.mode == CrowdingMode::Initial ? vi : vm).push_back(r.*field);
            (r.mode == CrowdingMode::Initial ? by_run_i : by_run_m)[r.run] = r.*field;
        }
        IndicatorRow row{id, summarize_values(vi), summarize_values(vm), {}, {}};
        row.direction = detail::direction_of(row.initial, row.improved, better);
        std::vector<double> a, b;
        for (const auto& [run, v] : by_run_m) {
            const auto it = by_run_i.find(run);
            if (it == by_run_i.end() || !std::isfinite(v) || !std::isfinite(it->second)) continue;
            // Orient both samples so that "larger" means "improved is better".
            a.push_back(better == Better::Lower ? -v : v);
            b.push_back(better == Better::Lower ? -it->second : it->second);
        }
        row.test = sign_test(a, b);
        return row;
    };

    for (auto id : order) {
        report.gd.push_back(indicator_row(id, &RunRecord::gd, Better::Lower));
        report.sp.push_back(indicator_row(id, &RunRecord::sp, Better::Lower));
        report.m2star.push_back(indicator_row(id, &RunRecord::m2star, Better::Higher));
        std::vector<double> ci, cm;
        for (const auto& p : res.pairs) {
            if (p.problem != id) continue;
            ci.push_back(p.c_initial_improved);
            cm.push_back(p.c_improved_initial);
        }
        if (ci.empty()) continue;
        CoverageRow row{id, summarize_values(ci), summarize_values(cm), {}, sign_test(cm, ci)};
        if (row.c_initial_improved.median == row.c_improved_initial.median) row.direction = "tie";
        else row.direction = row.c_improved_initial.median > row.c_initial_improved.median ? "improved" : "initial";
        report.coverage.push_back(row);
    }
    return report;
}

namespace detail {

inline std::string cell(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string indicator_table(const std::string& title, const std::vector<IndicatorRow>& rows)
{
    std::string out = title + "\n";
    out += "| problem | initial mean | initial median | improved mean | improved median | better | sign-test p |\n";
    out += "|---|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        out += "| " + std::string(problem_name(r.problem)) + " | " + cell(r.initial.mean) + " | " + cell(r.initial.median) + " | "
            + cell(r.improved.mean) + " | " + cell(r.improved.median) + " | " + r.direction + " | " + cell(r.test.p_value) + " |\n";
    }
    return out;
}

} // namespace detail

inline std::string format_report(const Report& report)
{
    std::string out;
    out += detail::indicator_table("GD (lower is better)", report.gd);
    out += "\nC metric (S1 = initial, S2 = improved)\n";
    out += "| problem | C(S1,S2) mean | C(S2,S1) mean | C(S1,S2) median | C(S2,S1) median | better | sign-test p |\n";
    out += "|---|---|---|---|---|---|---|\n";
    for (const auto& r : report.coverage) {
        out += "| " + std::string(problem_name(r.problem)) + " | " + detail::cell(r.c_initial_improved.mean) + " | "
            + detail::cell(r.c_improved_initial.mean) + " | " + detail::cell(r.c_initial_improved.median) + " | "
            + detail::cell(r.c_improved_initial.median) + " | " + r.direction + " | " + detail::cell(r.test.p_value) + " |\n";
    }
    out += "\n" + detail::indicator_table("SP (lower is better)", report.sp);
    out += "\n" + detail::indicator_table("M2* (higher is better)", report.m2star);
    return out;
}

} // namespace moea::harness
