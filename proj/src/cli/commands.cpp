#include "cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "binary_io.hpp"
#include "cli/log.hpp"
#include "frugal/error.hpp"
#include "frugal/image_io.hpp"
#include "service/service.hpp"

namespace frugal::cli {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_fail(const std::string& msg) { throw CommandError(ExitCode::config_error, msg); }
[[noreturn]] void data_fail(const std::string& msg) { throw CommandError(ExitCode::data_error, msg); }

std::uint64_t parse_u64(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        config_fail("seed '" + s + "' is not a non-negative integer");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        config_fail("seed '" + s + "' is out of range");
    }
}

void check_config(const RunConfig& config) {
    if (config.dataset.has_value() == config.synthetic.has_value())
        config_fail("exactly one of --dataset and --synthetic is required");
    if (config.strategies.empty()) config_fail("at least one strategy is required");
    if (config.seeds.empty()) config_fail("at least one seed is required");
    if (config.jobs == 0) config_fail("--jobs must be at least 1");
    const auto errors = validate_hyperparams(config.hp);
    if (!errors.empty()) config_fail(errors.front().message);
    if (config.synthetic) {
        try {
            parse_synthetic_spec(*config.synthetic);
        } catch (const Error& e) {
            config_fail(e.what());
        }
    }
}

// Loads a dataset directory once and reuses it across seeds.
class PoolSource {
public:
    explicit PoolSource(const RunConfig& config) : config_(config) {
        if (config.dataset) {
            LoadedDataset loaded;
            try {
                loaded = load_dataset(*config.dataset);
            } catch (const Error& e) {
                data_fail(e.what());
            }
            if (!loaded.labels) data_fail(config.dataset->string() + ": dataset has no labels for a simulated run");
            const auto unknown = std::count(loaded.labels->begin(), loaded.labels->end(), Label::unknown);
            if (unknown > 0)
                data_fail(config.dataset->string() + ": " + std::to_string(unknown) +
                          " samples lack a ground-truth label");
            loaded_ = LabeledSplit{std::move(loaded.dataset), std::move(*loaded.labels)};
        } else {
            spec_ = parse_synthetic_spec(*config.synthetic);
            fixed_seed_ = config.synthetic->find("seed=") != std::string::npos;
        }
    }

    LabeledSplit pool(std::uint64_t seed) const {
        if (loaded_) return *loaded_;
        SyntheticSpec spec = spec_;
        if (!fixed_seed_) spec.seed = seed;
        auto [ds, labels] = generate_synthetic(spec);
        return LabeledSplit{std::move(ds), std::move(labels)};
    }

private:
    const RunConfig& config_;
    std::optional<LabeledSplit> loaded_;
    SyntheticSpec spec_;
    bool fixed_seed_ = false;
};

Experiment make_experiment(const PoolSource& source, const RunConfig& config, std::uint64_t seed) {
    LabeledSplit pool = source.pool(seed);
    const auto report = validate_dataset(pool.data, &pool.labels);
    if (!report.ok()) data_fail(report.summary());
    Experiment ex;
    ex.seed = seed;
    try {
        ex.split = stratified_split(pool.data, pool.labels, seed);
    } catch (const Error& e) {
        data_fail(e.what());
    }
    const auto errors = validate_hyperparams(config.hp, ex.split.train.data.n);
    if (!errors.empty()) config_fail(errors.front().message);
    return ex;
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; results are
// stored by index so output order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < std::min<std::size_t>(jobs, count); ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct RunResult {
    SamplerKind strategy;
    std::uint64_t seed;
    MetricsTrace trace;
    std::size_t n_train;
};

std::vector<Experiment> prepare_all(const RunConfig& config) {
    PoolSource source(config);
    std::vector<Experiment> experiments(config.seeds.size());
    parallel_for(config.seeds.size(), config.jobs,
                 [&](std::size_t i) { experiments[i] = make_experiment(source, config, config.seeds[i]); });
    return experiments;
}

// Strategy-major: all seeds of the first strategy, then the next.
std::vector<RunResult> run_all(const RunConfig& config, const std::vector<Experiment>& experiments) {
    const std::size_t S = config.seeds.size();
    std::vector<RunResult> results(config.strategies.size() * S);
    parallel_for(results.size(), config.jobs, [&](std::size_t i) {
        const auto kind = config.strategies[i / S];
        const auto& ex = experiments[i % S];
        log::info(std::string("running ") + to_string(kind) + " seed " + std::to_string(ex.seed));
        results[i] = {kind, ex.seed,
                      run_simulated(ex.split.train.data, ex.split.train.labels, config.hp, kind, ex.split.eval, ex.seed),
                      ex.split.train.data.n};
    });
    return results;
}

struct Stats {
    double mean = 0;
    double stddev = 0;
    std::size_t count = 0;
};

Stats stats_of(const std::vector<double>& values) {
    Stats s;
    s.count = values.size();
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

// Per-iteration mean EER over several traces of one series.
MetricsTrace mean_trace(const std::vector<const MetricsTrace*>& traces, std::vector<Stats>* stats = nullptr) {
    MetricsTrace out;
    std::size_t len = 0;
    for (const auto* t : traces) len = std::max(len, t->records.size());
    for (std::size_t i = 0; i < len; ++i) {
        std::vector<double> eers;
        IterationRecord rec;
        for (const auto* t : traces) {
            if (i >= t->records.size()) continue;
            rec = t->records[i];
            if (t->records[i].eer) eers.push_back(*t->records[i].eer);
        }
        const Stats s = stats_of(eers);
        rec.eer = eers.empty() ? std::nullopt : std::optional<double>(s.mean);
        out.records.push_back(rec);
        if (stats) stats->push_back(s);
    }
    return out;
}

void write_artifact(const fs::path& path, const std::string& contents) {
    try {
        fs::create_directories(path.parent_path());
        detail::write_file_atomic(path, contents);
    } catch (const Error& e) {
        data_fail(e.what());
    } catch (const fs::filesystem_error& e) {
        data_fail(e.what());
    }
    log::info("wrote " + path.string());
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

void warn_if_first_iteration_differs(const std::vector<RunResult>& results, std::size_t seeds) {
    for (std::size_t s = 0; s < seeds; ++s) {
        const auto& ref = results[s].trace.records;
        for (std::size_t r = s + seeds; r < results.size(); r += seeds) {
            const auto& other = results[r].trace.records;
            if (!ref.empty() && !other.empty() && ref[0].eer != other[0].eer)
                log::warn("seed " + std::to_string(results[s].seed) + ": iteration-1 EER differs between " +
                          to_string(results[s].strategy) + " and " + to_string(results[r].strategy));
        }
    }
}

int guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const CommandError& e) {
        err << "error: " << e.what() << '\n';
        return e.code();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::numeric_failure: return ExitCode::numeric_error;
            case ErrorKind::io_error:
            case ErrorKind::version_error: return ExitCode::data_error;
            case ErrorKind::invalid_argument:
            case ErrorKind::invalid_state: return ExitCode::data_error;
        }
        return ExitCode::data_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::data_error;
    }
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            seeds.push_back(parse_u64(item));
            continue;
        }
        const auto lo = parse_u64(item.substr(0, dots));
        const auto hi = parse_u64(item.substr(dots + 2));
        if (hi < lo) config_fail("seed range '" + item + "' is empty");
        if (hi - lo >= 100000) config_fail("seed range '" + item + "' is too long");
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    if (seeds.empty()) config_fail("no seeds given");
    return seeds;
}

std::vector<SamplerKind> parse_strategy_list(const std::string& text) {
    if (text == "all") return all_samplers();
    std::vector<SamplerKind> kinds;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            const auto kind = sampler_from_string(item);
            if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) kinds.push_back(kind);
        } catch (const Error& e) {
            config_fail(e.what());
        }
    }
    if (kinds.empty()) config_fail("no strategies given");
    return kinds;
}

Experiment prepare_experiment(const RunConfig& config, std::uint64_t seed) {
    check_config(config);
    PoolSource source(config);
    return make_experiment(source, config, seed);
}

int cmd_run(const RunConfig& config, std::ostream& out) {
    check_config(config);
    const auto experiments = prepare_all(config);
    const auto results = run_all(config, experiments);
    const std::size_t S = config.seeds.size();

    for (std::size_t s = 0; s < S; ++s) {
        std::ostringstream csv;
        write_metrics_csv_header(csv);
        for (std::size_t k = 0; k < config.strategies.size(); ++k) {
            const auto& r = results[k * S + s];
            write_metrics_rows(r.trace, r.n_train, r.seed, csv);
        }
        write_artifact(config.out / ("metrics_seed" + std::to_string(config.seeds[s]) + ".csv"), csv.str());
    }

    AblationTable grid;
    grid.T = config.hp.T;
    grid.n_train = experiments.front().split.train.data.n;
    for (std::size_t k = 0; k < config.strategies.size(); ++k) {
        std::vector<const MetricsTrace*> traces;
        for (std::size_t s = 0; s < S; ++s) traces.push_back(&results[k * S + s].trace);
        grid.names.emplace_back(to_string(config.strategies[k]));
        grid.traces.push_back(mean_trace(traces));
    }
    std::ostringstream summary;
    write_ablation_grid(grid, summary);
    write_artifact(config.out / "summary.txt", summary.str());
    out << summary.str();
    return ExitCode::ok;
}

int cmd_compare(const RunConfig& config, std::ostream& out) {
    check_config(config);
    if (config.strategies.size() < 2) config_fail("compare needs at least two strategies");
    const auto experiments = prepare_all(config);
    const auto results = run_all(config, experiments);
    const std::size_t S = config.seeds.size();
    warn_if_first_iteration_differs(results, S);

    std::vector<double> floors(S);
    parallel_for(S, config.jobs, [&](std::size_t s) {
        const auto& ex = experiments[s];
        Hyperparams hp = config.hp;
        hp.seed = ex.seed;
        floors[s] = run_fully_supervised(ex.split.train.data, ex.split.train.labels, ex.split.eval, hp);
    });
    const Stats floor = stats_of(floors);
    const std::size_t n_train = experiments.front().split.train.data.n;

    std::ostringstream runs;
    write_metrics_csv_header(runs);
    for (const auto& r : results) write_metrics_rows(r.trace, r.n_train, r.seed, runs);
    write_artifact(config.out / "runs.csv", runs.str());

    std::ostringstream csv;
    csv << "series,iter,samp_pct,mean_eer,std_eer,seeds\n";
    AblationTable grid;
    grid.T = config.hp.T;
    grid.n_train = n_train;
    for (std::size_t k = 0; k < config.strategies.size(); ++k) {
        std::vector<const MetricsTrace*> traces;
        for (std::size_t s = 0; s < S; ++s) traces.push_back(&results[k * S + s].trace);
        std::vector<Stats> stats;
        auto mean = mean_trace(traces, &stats);
        for (std::size_t i = 0; i < mean.records.size(); ++i) {
            const auto& rec = mean.records[i];
            csv << to_string(config.strategies[k]) << ',' << rec.t << ','
                << format_samp_pct(rec.labeled_count, n_train) << ',' << fmt("%.6f", stats[i].mean) << ','
                << fmt("%.6f", stats[i].stddev) << ',' << stats[i].count << '\n';
        }
        grid.names.emplace_back(to_string(config.strategies[k]));
        grid.traces.push_back(std::move(mean));
    }
    MetricsTrace floor_trace = grid.traces.front();
    for (auto& rec : floor_trace.records) {
        rec.eer = floor.mean;
        csv << "supervised," << rec.t << ',' << format_samp_pct(rec.labeled_count, n_train) << ','
            << fmt("%.6f", floor.mean) << ',' << fmt("%.6f", floor.stddev) << ',' << floor.count << '\n';
    }
    grid.names.emplace_back("supervised");
    grid.traces.push_back(std::move(floor_trace));
    write_artifact(config.out / "compare.csv", csv.str());

    std::ostringstream summary;
    write_ablation_grid(grid, summary);
    write_artifact(config.out / "compare.txt", summary.str());
    out << summary.str();
    return ExitCode::ok;
}

int cmd_ablate(const RunConfig& config, std::ostream& out) {
    check_config(config);
    const auto experiments = prepare_all(config);
    const std::size_t S = experiments.size();
    std::vector<AblationTable> tables(S);
    parallel_for(S, config.jobs, [&](std::size_t s) {
        const auto& ex = experiments[s];
        log::info("ablation seed " + std::to_string(ex.seed));
        tables[s] = run_ablation(ex.split.train.data, ex.split.train.labels, config.hp, ex.split.eval, ex.seed);
    });

    AblationTable grid;
    grid.T = config.hp.T;
    grid.n_train = tables.front().n_train;
    grid.names = tables.front().names;
    std::ostringstream csv;
    csv << "config,iter,samp_pct,mean_eer,std_eer,seeds\n";
    for (std::size_t r = 0; r < grid.names.size(); ++r) {
        std::vector<const MetricsTrace*> traces;
        for (const auto& t : tables) traces.push_back(&t.traces[r]);
        std::vector<Stats> stats;
        auto mean = mean_trace(traces, &stats);
        for (std::size_t i = 0; i < mean.records.size(); ++i)
            csv << grid.names[r] << ',' << mean.records[i].t << ','
                << format_samp_pct(mean.records[i].labeled_count, grid.n_train) << ',' << fmt("%.6f", stats[i].mean)
                << ',' << fmt("%.6f", stats[i].stddev) << ',' << stats[i].count << '\n';
        grid.traces.push_back(std::move(mean));
    }
    std::ostringstream text;
    write_ablation_grid(grid, text);
    write_artifact(config.out / "ablation.txt", text.str());
    write_artifact(config.out / "ablation.csv", csv.str());
    out << text.str();
    return ExitCode::ok;
}

namespace {

void add_experiment_options(CLI::App* cmd, RunConfig& config, std::string& strategy, std::string& seeds,
                            const std::string& default_strategy) {
    strategy = default_strategy;
    cmd->add_option("--dataset", config.dataset, "Dataset directory with ground-truth labels");
    cmd->add_option("--synthetic", config.synthetic, "Synthetic pool spec: 'default' or key=value,...");
    cmd->add_option("--alpha", config.hp.alpha, "Diversity weight")->capture_default_str();
    cmd->add_option("--beta", config.hp.beta, "Ambiguity weight")->capture_default_str();
    cmd->add_option("--gamma", config.hp.gamma, "Cardinality weight (must be positive)")->capture_default_str();
    cmd->add_option("--clusters", config.hp.K, "K-means cluster count")->capture_default_str();
    cmd->add_option("--display-size", config.hp.B, "Samples per display")->capture_default_str();
    cmd->add_option("--budget", config.hp.T, "Number of displays")->capture_default_str();
    cmd->add_option("--strategy", strategy, "proposed, maxmin, uncertainty, random, a comma list, or all")
        ->capture_default_str();
    cmd->add_option("--seeds", seeds, "Seed list such as 1..10 or 1,4,9")->capture_default_str();
    cmd->add_option("--out", config.out, "Output directory")->capture_default_str();
    cmd->add_option("--jobs", config.jobs, "Worker threads")->capture_default_str();
    cmd->add_option("--svm-lambda", config.hp.svm_lambda, "SVM regularization")->capture_default_str();
    cmd->add_option("--svm-epochs", config.hp.svm_epochs, "SVM epochs")->capture_default_str();
    cmd->add_option("--kmeans-restarts", config.hp.kmeans_restarts, "K-means restarts")->capture_default_str();
    cmd->add_option("--fp-relaxation", config.hp.fp_relaxation, "Solver relaxation, 0 = automatic")
        ->capture_default_str();
    cmd->add_option("--max-fp-iter", config.hp.max_fp_iter, "Solver iteration cap")->capture_default_str();
    cmd->add_flag("--unlabeled-only", config.hp.solve_unlabeled_only, "Solve over unlabeled samples only");
}

LabelVector labels_from_csv(const fs::path& path, const Dataset& ds) {
    std::ifstream in(path);
    if (!in) data_fail("cannot open " + path.string());
    std::map<std::string, std::size_t> row;
    for (std::size_t i = 0; i < ds.n; ++i) row[ds.ids[i]] = i;
    LabelVector labels(ds.n, Label::unknown);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("id,", 0) == 0)) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) data_fail(path.string() + ":" + std::to_string(line_no) + ": expected id,y");
        const auto id = line.substr(0, comma);
        const auto it = row.find(id);
        if (it == row.end()) data_fail(path.string() + ":" + std::to_string(line_no) + ": unknown id '" + id + "'");
        const auto y = line.substr(comma + 1);
        if (y == "1" || y == "+1") labels[it->second] = Label::positive;
        else if (y == "-1") labels[it->second] = Label::negative;
        else if (!(y.empty() || y == "0")) data_fail(path.string() + ":" + std::to_string(line_no) + ": bad label");
    }
    return labels;
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interactive display selection for change detection"};
    app.require_subcommand(1);

    RunConfig run_cfg, cmp_cfg, abl_cfg;
    std::string run_strategy, run_seeds = "1", cmp_strategy, cmp_seeds = "1..10", abl_strategy, abl_seeds = "1";
    auto* run = app.add_subcommand("run", "Simulated sessions, one CSV per seed plus a summary grid");
    add_experiment_options(run, run_cfg, run_strategy, run_seeds, "proposed");
    auto* compare = app.add_subcommand("compare", "Mean and spread of EER per strategy with the supervised floor");
    add_experiment_options(compare, cmp_cfg, cmp_strategy, cmp_seeds, "all");
    auto* ablate = app.add_subcommand("ablate", "Seven-configuration ablation grid of the display model");
    add_experiment_options(ablate, abl_cfg, abl_strategy, abl_seeds, "proposed");

    std::string gen_spec = "default";
    fs::path gen_out = "data/synthetic";
    auto* generate = app.add_subcommand("generate", "Write a synthetic labeled pool as a dataset directory");
    generate->add_option("--synthetic", gen_spec, "Synthetic pool spec")->capture_default_str();
    generate->add_option("--out", gen_out, "Dataset directory")->capture_default_str();

    fs::path ref_path, test_path, ext_out = "data/scene", ext_labels;
    std::string mode = "concat";
    PatchGrid grid;
    bool no_patches = false;
    auto* extract = app.add_subcommand("extract", "Cut a registered image pair into patch pairs");
    extract->add_option("--ref", ref_path, "Reference image (PNG or PPM)")->required();
    extract->add_option("--test", test_path, "Test image (PNG or PPM)")->required();
    extract->add_option("--out", ext_out, "Dataset directory")->capture_default_str();
    extract->add_option("--feature-mode", mode, "concat or absdiff")->capture_default_str();
    extract->add_option("--patch-size", grid.patch_size, "Patch edge in pixels")->capture_default_str();
    extract->add_option("--stride", grid.stride, "Grid stride in pixels")->capture_default_str();
    extract->add_option("--labels", ext_labels, "CSV of id,y ground truth");
    extract->add_flag("--no-patches", no_patches, "Skip writing patch images");

    fs::path csv_in, imp_out = "data/imported";
    auto* import = app.add_subcommand("import", "Convert an id,y,f_1..f_d CSV into a dataset directory");
    import->add_option("--csv", csv_in, "Input CSV")->required();
    import->add_option("--out", imp_out, "Dataset directory")->capture_default_str();

    service::ServiceConfig svc;
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "HTTP service for human labeling sessions");
    serve->add_option("--serve-port", port, "Listening port")->capture_default_str();
    serve->add_option("--host", svc.host, "Listening address")->capture_default_str();
    serve->add_option("--data-root", svc.data_root, "Directory of dataset directories")->capture_default_str();
    serve->add_option("--state-dir", svc.state_dir, "Event log directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : ExitCode::config_error;
    }

    auto finish = [&](RunConfig& cfg, const std::string& strategy, const std::string& seeds) {
        cfg.strategies = parse_strategy_list(strategy);
        cfg.seeds = parse_seed_list(seeds);
    };

    return guarded(
        [&]() -> int {
            if (*run) {
                finish(run_cfg, run_strategy, run_seeds);
                return cmd_run(run_cfg, out);
            }
            if (*compare) {
                finish(cmp_cfg, cmp_strategy, cmp_seeds);
                return cmd_compare(cmp_cfg, out);
            }
            if (*ablate) {
                finish(abl_cfg, abl_strategy, abl_seeds);
                return cmd_ablate(abl_cfg, out);
            }
            if (*generate) {
                SyntheticSpec spec;
                try {
                    spec = parse_synthetic_spec(gen_spec);
                } catch (const Error& e) {
                    config_fail(e.what());
                }
                auto [ds, labels] = generate_synthetic(spec);
                save_dataset(ds, &labels, gen_out);
                out << "wrote " << ds.n << " samples to " << gen_out.string() << '\n';
                return ExitCode::ok;
            }
            if (*extract) {
                FeatureMode fm;
                try {
                    fm = feature_mode_from_string(mode);
                } catch (const Error& e) {
                    config_fail(e.what());
                }
                if (grid.patch_size == 0 || grid.stride == 0) config_fail("patch size and stride must be positive");
                const Image ref = read_image(ref_path);
                const Image test = read_image(test_path);
                auto ds = extract_patch_pairs(ref, test, grid, fm);
                if (ds.n == 0) data_fail("images are smaller than one patch");
                std::optional<LabelVector> labels;
                if (!ext_labels.empty()) labels = labels_from_csv(ext_labels, ds);
                if (!no_patches) export_patch_images(ref, test, ds, ext_out);
                else ds.patch_refs.clear();
                save_dataset(ds, labels ? &*labels : nullptr, ext_out);
                out << "wrote " << ds.n << " patch pairs (d = " << ds.d << ") to " << ext_out.string() << '\n';
                return ExitCode::ok;
            }
            if (*import) {
                auto loaded = import_csv(csv_in);
                const auto report = validate_dataset(loaded.dataset, loaded.labels ? &*loaded.labels : nullptr);
                if (!report.ok()) data_fail(report.summary());
                save_dataset(loaded.dataset, loaded.labels ? &*loaded.labels : nullptr, imp_out);
                out << "wrote " << loaded.dataset.n << " samples to " << imp_out.string() << '\n';
                return ExitCode::ok;
            }
            if (*serve) {
                if (port <= 0 || port > 65535) config_fail("--serve-port must lie in 1..65535");
                service::Service service(svc);
                out << "listening on " << svc.host << ":" << port << std::endl;
                return service.listen(port) ? ExitCode::ok : ExitCode::data_error;
            }
            return ExitCode::config_error;
        },
        err);
}

}  // namespace frugal::cli
