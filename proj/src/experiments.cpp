#include "unhap/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "unhap/evaluation.hpp"
#include "unhap/parallel.hpp"
#include "unhap/simulator.hpp"

namespace unhap {

Scale parse_scale(std::string_view name) {
    if (name == "desk") return Scale::Desk;
    if (name == "paper") return Scale::Paper;
    throw ConfigError("unknown scale '" + std::string(name) + "'");
}

std::string_view to_string(Scale scale) { return scale == Scale::Desk ? "desk" : "paper"; }

std::string Table::to_csv() const {
    std::ostringstream out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out.str();
}

std::size_t Table::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError("table has no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

std::vector<const std::vector<std::string>*> Table::select(
    const std::vector<std::pair<std::string, std::string>>& where) const {
    std::vector<std::pair<std::size_t, std::string>> cols;
    for (const auto& [name, value] : where) cols.emplace_back(column(name), value);
    std::vector<const std::vector<std::string>*> out;
    for (const auto& r : rows)
        if (std::all_of(cols.begin(), cols.end(), [&r](const auto& c) { return r[c.first] == c.second; }))
            out.push_back(&r);
    return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
    auto mix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    };
    std::uint64_t h = mix(base);
    for (auto k : keys) h = mix(h ^ mix(k));
    return h;
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 10);
    return std::string(buf, res.ptr);
}

struct Record {
    std::vector<std::string> key;
    int rep{0};
    std::uint64_t seed{0};
    std::string method;
    std::vector<double> values;
    double seconds{0};
};

struct Sweep {
    std::vector<std::string> key_names;
    std::vector<std::string> value_names;
    std::vector<Record> records;
};

Table runs_table(const Sweep& s) {
    Table t;
    t.header = s.key_names;
    for (auto h : {"method", "rep", "seed"}) t.header.emplace_back(h);
    t.header.insert(t.header.end(), s.value_names.begin(), s.value_names.end());
    for (const auto& r : s.records) {
        std::vector<std::string> row = r.key;
        row.push_back(r.method);
        row.push_back(std::to_string(r.rep));
        row.push_back(std::to_string(r.seed));
        for (double v : r.values) row.push_back(num(v));
        t.rows.push_back(std::move(row));
    }
    return t;
}

// Groups by (key, method) in first-appearance order.
template <typename F>
void for_each_group(const Sweep& s, F&& f) {
    std::vector<std::pair<std::vector<std::string>, std::string>> order;
    for (const auto& r : s.records) {
        const auto id = std::make_pair(r.key, r.method);
        if (std::find(order.begin(), order.end(), id) == order.end()) order.push_back(id);
    }
    for (const auto& id : order) {
        std::vector<const Record*> members;
        for (const auto& r : s.records)
            if (r.key == id.first && r.method == id.second) members.push_back(&r);
        f(id.first, id.second, members);
    }
}

Table summary_table(const Sweep& s) {
    Table t;
    t.header = s.key_names;
    t.header.emplace_back("method");
    t.header.emplace_back("reps");
    for (const auto& v : s.value_names) t.header.push_back("median_" + v);
    t.header.push_back("q25_" + s.value_names.front());
    t.header.push_back("q75_" + s.value_names.front());
    for_each_group(s, [&](const auto& key, const std::string& method, const std::vector<const Record*>& members) {
        std::vector<std::string> row = key;
        row.push_back(method);
        row.push_back(std::to_string(members.size()));
        std::vector<double> first;
        for (std::size_t c = 0; c < s.value_names.size(); ++c) {
            std::vector<double> col;
            for (const auto* m : members) col.push_back(m->values[c]);
            if (c == 0) first = col;
            row.push_back(num(median(col)));
        }
        row.push_back(num(quantile(first, 0.25)));
        row.push_back(num(quantile(first, 0.75)));
        t.rows.push_back(std::move(row));
    });
    return t;
}

Table timing_table(const Sweep& s) {
    Table t;
    t.header = s.key_names;
    for (auto h : {"method", "reps", "median_seconds"}) t.header.emplace_back(h);
    for_each_group(s, [&](const auto& key, const std::string& method, const std::vector<const Record*>& members) {
        std::vector<std::string> row = key;
        std::vector<double> secs;
        for (const auto* m : members) secs.push_back(m->seconds);
        row.push_back(method);
        row.push_back(std::to_string(members.size()));
        row.push_back(num(median(secs)));
        t.rows.push_back(std::move(row));
    });
    return t;
}

struct Truth {
    double mu;
    double mu_tilde;
    KernelParams kernel;
};

ModelParams truth_params(const Truth& truth, std::shared_ptr<const MarkModel> marks) {
    ModelParams p(1, truth.kernel, std::move(marks));
    p.mu(0) = truth.mu;
    p.mu_tilde(0) = truth.mu_tilde;
    return p;
}

EventSequence simulate(const Truth& truth, double T, std::uint64_t seed, const MarkModel& marks) {
    SimConfig sc;
    sc.mu = truth.mu;
    sc.mu_tilde = truth.mu_tilde;
    sc.T = T;
    sc.kernel = truth.kernel;
    sc.seed = seed;
    return simulate_mixture(sc, marks);
}

SolverConfig solver_for(const ExperimentOptions& opts, FitMode mode, KernelFamily family, std::uint64_t seed) {
    SolverConfig cfg;
    cfg.mode = mode;
    cfg.family = family;
    cfg.n_iter = opts.n_iter.value_or(10000);
    cfg.b = std::min(200, cfg.n_iter);
    cfg.step = 0.01;
    cfg.W = 1.0;
    cfg.init.scheme = InitScheme::MomentsMean;
    cfg.init.window = DelayWindow::Relative;
    cfg.init.seed = seed;
    cfg.seed = seed;
    return cfg;
}

std::vector<int> truth_labels(const EventSequence& seq) {
    std::vector<int> out;
    for (const auto& e : seq.events[0]) out.push_back(e.label.value_or(1));
    return out;
}

struct Timed {
    FitResult result;
    double seconds;
};

Timed timed_fit(const EventSequence& seq, std::shared_ptr<const MarkModel> marks, const SolverConfig& cfg) {
    const auto t0 = Clock::now();
    FitResult r = fit(seq, std::move(marks), cfg);
    return {std::move(r), std::chrono::duration<double>(Clock::now() - t0).count()};
}

std::shared_ptr<const MarkModel> builtin(const std::string& name) {
    return std::make_shared<const MarkModel>(MarkModel::builtin(name));
}

std::string setting_name(const std::string& marks) {
    if (marks == "identity-linear") return "linear";
    if (marks == "identity-uniform") return "uniform";
    if (marks == "identity-smallmark") return "smallmark";
    return marks;
}

void report(const ExperimentOptions& opts, const std::string& msg) {
    if (opts.progress) opts.progress(msg);
}

// Runs one job per cell x rep and returns the flattened records in job order.
struct Cell {
    std::vector<std::string> key;
    std::function<std::vector<Record>(int rep)> run;
};

std::vector<Record> run_cells(const std::string& name, const std::vector<Cell>& cells, int reps,
                              const ExperimentOptions& opts) {
    const std::size_t n = cells.size() * static_cast<std::size_t>(reps);
    std::atomic<std::size_t> done{0};
    const auto per_job = parallel_map<std::vector<Record>>(
        n,
        [&](std::size_t k) {
            const auto& cell = cells[k / static_cast<std::size_t>(reps)];
            auto out = cell.run(static_cast<int>(k % static_cast<std::size_t>(reps)));
            const std::size_t d = ++done;
            if (d % std::max<std::size_t>(1, n / 20) == 0 || d == n)
                report(opts, name + ": " + std::to_string(d) + "/" + std::to_string(n) + " runs");
            return out;
        },
        opts.workers);
    std::vector<Record> all;
    for (const auto& v : per_job) all.insert(all.end(), v.begin(), v.end());
    return all;
}

const std::vector<std::string> kNoiseSettings{"identity-linear", "identity-uniform"};

ExperimentOutput fig2(const ExperimentOptions& opts) {
    const bool desk = opts.scale == Scale::Desk;
    const std::vector<double> noise = desk ? std::vector<double>{0.1, 0.5, 1.0, 1.5}
                                           : std::vector<double>{0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
    const std::vector<double> horizons = desk ? std::vector<double>{1000} : std::vector<double>{100, 1000, 10000};
    const int reps = opts.reps.value_or(desk ? 10 : 100);

    Sweep s;
    s.key_names = {"mu_tilde", "setting", "T"};
    s.value_names = {"error", "mu", "mu_tilde_hat", "alpha", "m", "sigma", "precision", "recall", "n_events"};
    std::vector<Cell> cells;
    for (std::size_t a = 0; a < noise.size(); ++a)
        for (std::size_t b = 0; b < kNoiseSettings.size(); ++b)
            for (std::size_t c = 0; c < horizons.size(); ++c) {
                const double mut = noise[a];
                const std::string marks_name = kNoiseSettings[b];
                const double T = horizons[c];
                Cell cell;
                cell.key = {num(mut), setting_name(marks_name), num(T)};
                cell.run = [=, &opts, key = cell.key](int rep) {
                    const auto marks = builtin(marks_name);
                    const Truth truth{0.8, mut, make_trunc_gauss(1.45, 0.5, 0.1, 1.0)};
                    const std::uint64_t seed = derive_seed(opts.seed, {2, a, b, c, static_cast<std::uint64_t>(rep)});
                    const EventSequence seq = simulate(truth, T, seed, *marks);
                    const ModelParams true_params = truth_params(truth, marks);
                    const auto labels = truth_labels(seq);
                    std::vector<Record> out;
                    for (FitMode mode : {FitMode::Unhap, FitMode::JointFadin}) {
                        const auto [r, secs] = timed_fit(seq, marks, solver_for(opts, mode, KernelFamily::TruncatedGaussian, seed));
                        const auto pr = rho_precision_recall(r.labels[0], labels);
                        const KernelVector v = to_vector(r.params.kernel(0, 0));
                        out.push_back({key, rep, seed, std::string(to_string(mode)),
                                       {param_error(r.params, true_params), r.params.mu(0), r.params.mu_tilde(0), v(0),
                                        v(1), v(2), pr.precision, pr.recall, static_cast<double>(seq.size())},
                                       secs});
                    }
                    return out;
                };
                cells.push_back(std::move(cell));
            }
    s.records = run_cells("fig2", cells, reps, opts);
    ExperimentOutput out;
    out.tables["fig2.csv"] = summary_table(s);
    out.tables["fig2_runs.csv"] = runs_table(s);
    out.timings["fig2_timing.csv"] = timing_table(s);
    return out;
}

ExperimentOutput fig3(const ExperimentOptions& opts) {
    const bool desk = opts.scale == Scale::Desk;
    const std::vector<double> alphas{0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
    const std::vector<double> noise{0.1, 0.5, 1.0};
    const std::vector<double> horizons = desk ? std::vector<double>{1000} : std::vector<double>{100, 1000, 10000};
    const int reps = opts.reps.value_or(10);

    Sweep s;
    s.key_names = {"alpha", "mu_tilde", "setting", "T"};
    s.value_names = {"precision", "recall", "error", "n_events"};
    std::vector<Cell> cells;
    for (std::size_t a = 0; a < alphas.size(); ++a)
        for (std::size_t n = 0; n < noise.size(); ++n)
            for (std::size_t b = 0; b < kNoiseSettings.size(); ++b)
                for (std::size_t c = 0; c < horizons.size(); ++c) {
                    const double alpha = alphas[a];
                    const double mut = noise[n];
                    const std::string marks_name = kNoiseSettings[b];
                    const double T = horizons[c];
                    Cell cell;
                    cell.key = {num(alpha), num(mut), setting_name(marks_name), num(T)};
                    cell.run = [=, &opts, key = cell.key](int rep) {
                        const auto marks = builtin(marks_name);
                        const Truth truth{0.4, mut, make_trunc_gauss(alpha, 0.5, 0.1, 1.0)};
                        const std::uint64_t seed =
                            derive_seed(opts.seed, {3, a, n, b, c, static_cast<std::uint64_t>(rep)});
                        const EventSequence seq = simulate(truth, T, seed, *marks);
                        const auto [r, secs] =
                            timed_fit(seq, marks, solver_for(opts, FitMode::Unhap, KernelFamily::TruncatedGaussian, seed));
                        const auto pr = rho_precision_recall(r.labels[0], truth_labels(seq));
                        return std::vector<Record>{{key, rep, seed, "unhap",
                                                    {pr.precision, pr.recall, param_error(r.params, truth_params(truth, marks)),
                                                     static_cast<double>(seq.size())},
                                                    secs}};
                    };
                    cells.push_back(std::move(cell));
                }
    s.records = run_cells("fig3", cells, reps, opts);
    ExperimentOutput out;
    out.tables["fig3.csv"] = summary_table(s);
    out.tables["fig3_runs.csv"] = runs_table(s);
    out.timings["fig3_timing.csv"] = timing_table(s);
    return out;
}

// NLL benchmark shared by the marked and unmarked tables.
ExperimentOutput nll_benchmark(const ExperimentOptions& opts, const std::string& name, const std::string& marks_name,
                               double alpha, const std::vector<double>& noise, FitMode baseline) {
    const std::vector<double> horizons{100, 500, 1000};
    const int reps = opts.reps.value_or(10);
    Sweep s;
    s.key_names = {"mu_tilde", "T"};
    s.value_names = {"nll", "error", "precision", "recall", "n_events"};
    std::vector<Cell> cells;
    for (std::size_t n = 0; n < noise.size(); ++n)
        for (std::size_t c = 0; c < horizons.size(); ++c) {
            const double mut = noise[n];
            const double T = horizons[c];
            Cell cell;
            cell.key = {num(mut), num(T)};
            cell.run = [=, &opts, key = cell.key](int rep) {
                const auto marks = builtin(marks_name);
                const Truth truth{0.1, mut, make_trunc_gauss(alpha, 0.5, 0.1, 1.0)};
                const auto r64 = static_cast<std::uint64_t>(rep);
                const std::uint64_t seed = derive_seed(opts.seed, {4, n, c, r64});
                const EventSequence train = simulate(truth, T, seed, *marks);
                const EventSequence test = simulate(truth, T, derive_seed(opts.seed, {5, n, c, r64}), *marks);
                const ModelParams true_params = truth_params(truth, marks);
                const auto labels = truth_labels(train);
                std::vector<Record> out;
                for (FitMode mode : {FitMode::Unhap, baseline}) {
                    const auto [r, secs] = timed_fit(train, marks, solver_for(opts, mode, KernelFamily::TruncatedGaussian, seed));
                    const NllPolicy policy = mode == FitMode::Unhap ? NllPolicy::Mixture : NllPolicy::HawkesOnly;
                    const double nll = test.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                    : test_nll(r.params, policy, test, 0.01).value;
                    const auto pr = rho_precision_recall(r.labels[0], labels);
                    out.push_back({key, rep, seed, std::string(to_string(mode)),
                                   {nll, param_error(r.params, true_params), pr.precision, pr.recall, static_cast<double>(train.size())}, secs});
                }
                return out;
            };
            cells.push_back(std::move(cell));
        }
    s.records = run_cells(name, cells, reps, opts);
    ExperimentOutput out;
    out.tables[name + ".csv"] = summary_table(s);
    out.tables[name + "_runs.csv"] = runs_table(s);
    out.timings[name + "_timing.csv"] = timing_table(s);
    return out;
}

ExperimentOutput init_study(const ExperimentOptions& opts) {
    const bool desk = opts.scale == Scale::Desk;
    const std::vector<double> horizons = desk ? std::vector<double>{100, 1000} : std::vector<double>{100, 1000, 10000};
    const std::vector<KernelFamily> families{KernelFamily::RaisedCosine, KernelFamily::TruncatedGaussian};
    const int reps = opts.reps.value_or(10);
    Sweep s;
    s.key_names = {"kernel", "setting", "T"};
    s.value_names = {"error", "precision", "recall", "n_events"};
    std::vector<Cell> cells;
    for (std::size_t f = 0; f < families.size(); ++f)
        for (std::size_t b = 0; b < kNoiseSettings.size(); ++b)
            for (std::size_t c = 0; c < horizons.size(); ++c) {
                const KernelFamily family = families[f];
                const std::string marks_name = kNoiseSettings[b];
                const double T = horizons[c];
                Cell cell;
                cell.key = {std::string(to_string(family)), setting_name(marks_name), num(T)};
                cell.run = [=, &opts, key = cell.key](int rep) {
                    const auto marks = builtin(marks_name);
                    const KernelParams kernel = family == KernelFamily::RaisedCosine
                                                    ? make_raised_cosine(1.4, 0.4, 0.1, 1.0)
                                                    : make_trunc_gauss(1.4, 0.5, 0.1, 1.0);
                    const Truth truth{0.8, 0.5, kernel};
                    const std::uint64_t seed = derive_seed(opts.seed, {6, f, b, c, static_cast<std::uint64_t>(rep)});
                    const EventSequence seq = simulate(truth, T, seed, *marks);
                    const ModelParams true_params = truth_params(truth, marks);
                    const auto labels = truth_labels(seq);
                    std::vector<Record> out;
                    for (InitScheme scheme : {InitScheme::MomentsMean, InitScheme::Random}) {
                        SolverConfig cfg = solver_for(opts, FitMode::Unhap, family, seed);
                        cfg.init.scheme = scheme;
                        const auto [r, secs] = timed_fit(seq, marks, cfg);
                        const auto pr = rho_precision_recall(r.labels[0], labels);
                        out.push_back({key, rep, seed, std::string(to_string(scheme)),
                                       {param_error(r.params, true_params), pr.precision, pr.recall,
                                        static_cast<double>(seq.size())},
                                       secs});
                    }
                    return out;
                };
                cells.push_back(std::move(cell));
            }
    s.records = run_cells("init-study", cells, reps, opts);
    ExperimentOutput out;
    out.tables["init-study.csv"] = summary_table(s);
    out.tables["init-study_runs.csv"] = runs_table(s);
    out.timings["init-study_timing.csv"] = timing_table(s);
    return out;
}

ExperimentOutput b_sensitivity(const ExperimentOptions& opts) {
    const std::vector<int> bs{10, 25, 50, 75, 100, 200};
    const std::vector<std::pair<std::string, double>> settings{{"non-noisy", 0.1}, {"noisy", 1.0}};
    const int reps = opts.reps.value_or(10);
    Sweep s;
    s.key_names = {"b", "setting", "mu_tilde"};
    s.value_names = {"error", "precision", "recall", "refreshes"};
    std::vector<Cell> cells;
    for (std::size_t k = 0; k < bs.size(); ++k)
        for (std::size_t n = 0; n < settings.size(); ++n) {
            const int b = bs[k];
            const double mut = settings[n].second;
            Cell cell;
            cell.key = {std::to_string(b), settings[n].first, num(mut)};
            cell.run = [=, &opts, key = cell.key](int rep) {
                const auto marks = builtin("identity-uniform");
                const Truth truth{0.8, mut, make_trunc_gauss(1.4, 0.5, 0.1, 1.0)};
                // Same data for every b.
                const std::uint64_t seed = derive_seed(opts.seed, {7, n, static_cast<std::uint64_t>(rep)});
                const EventSequence seq = simulate(truth, 1000.0, seed, *marks);
                SolverConfig cfg = solver_for(opts, FitMode::Unhap, KernelFamily::TruncatedGaussian, seed);
                cfg.b = std::min(b, cfg.n_iter);
                const auto [r, secs] = timed_fit(seq, marks, cfg);
                const auto pr = rho_precision_recall(r.labels[0], truth_labels(seq));
                return std::vector<Record>{{key, rep, seed, "unhap",
                                            {param_error(r.params, truth_params(truth, marks)), pr.precision, pr.recall,
                                             static_cast<double>(r.refreshes)},
                                            secs}};
            };
            cells.push_back(std::move(cell));
        }
    s.records = run_cells("b-sensitivity", cells, reps, opts);
    ExperimentOutput out;
    Table summary = summary_table(s);
    summary.header.emplace_back("recommended");
    for (auto& row : summary.rows) row.emplace_back(row[0] == "200" ? "1" : "0");
    out.tables["b-sensitivity.csv"] = std::move(summary);
    out.tables["b-sensitivity_runs.csv"] = runs_table(s);
    out.timings["b-sensitivity_timing.csv"] = timing_table(s);
    return out;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"fig2",          "fig3",       "table1-marked",
                                                "table-unmarked", "init-study", "b-sensitivity"};
    return names;
}

ExperimentOutput run_experiment(std::string_view name, const ExperimentOptions& opts) {
    if (opts.reps && *opts.reps < 1) throw ConfigError("reps must be >= 1");
    if (opts.n_iter && *opts.n_iter < 1) throw ConfigError("n_iter must be >= 1");
    if (name == "fig2") return fig2(opts);
    if (name == "fig3") return fig3(opts);
    if (name == "table1-marked")
        return nll_benchmark(opts, "table1-marked", "identity-smallmark", 1.0, {1.0}, FitMode::JointFadin);
    if (name == "table-unmarked")
        return nll_benchmark(opts, "table-unmarked", "unmarked", 0.9, {0.1, 1.0}, FitMode::FadinUnmarked);
    if (name == "init-study") return init_study(opts);
    if (name == "b-sensitivity") return b_sensitivity(opts);
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

}  // namespace unhap
