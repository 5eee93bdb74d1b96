#include "narx/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "narx/errors.hpp"

namespace narx {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_json(const fs::path& path, const json& value) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path.string());
    out << value.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& path, const std::string& header) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path.string());
    out << header << '\n';
    return out;
}

json to_json(const MetricsRecord& m) {
    return {{"rmse", m.rmse}, {"mae", m.mae}, {"mape_percent", m.mape_percent}, {"count", m.count}};
}

json to_json(const TrainReport& r) {
    return {{"epoch_losses", r.epoch_losses},
            {"valid_rmse", r.valid_rmse},
            {"valid_mae", r.valid_mae},
            {"best_epoch", r.best_epoch},
            {"final_lr", r.final_lr},
            {"iterations", r.iterations},
            {"wall_seconds", r.wall_seconds},
            {"seed", r.seed}};
}

json summary_json(std::span<const double> values) {
    const SeedSummary s = summarize(values);
    return {{"mean", s.mean}, {"std", s.std}};
}

/// Mean/std across runs of every metric of every split.
json aggregate_json(std::span<const RunOutcome* const> runs) {
    json out;
    const std::pair<const char*, const MetricsRecord RunOutcome::*> splits[] = {
        {"train", &RunOutcome::train}, {"valid", &RunOutcome::valid}, {"test", &RunOutcome::test}};
    for (const auto& [name, member] : splits) {
        std::vector<double> r, a, p;
        for (const RunOutcome* run : runs) {
            r.push_back((run->*member).rmse);
            a.push_back((run->*member).mae);
            p.push_back((run->*member).mape_percent);
        }
        out[name] = {{"rmse", summary_json(r)}, {"mae", summary_json(a)},
                     {"mape_percent", summary_json(p)}};
    }
    return out;
}

SplitSpec splits_for(const RunConfig& cfg, std::size_t length) {
    return cfg.splits.train_len == 0 ? default_split(length) : cfg.splits;
}

PreparedData load_prepared(const RunConfig& cfg, std::size_t T) {
    const RawSeries raw = load_csv(cfg.dataset, cfg.target_column);
    return prepare_data(raw, splits_for(cfg, raw.length()), T, cfg.normalization);
}

/// Runs every (data, hp, seed) job, `jobs` at a time.
struct Job {
    const PreparedData* data;
    Hyperparams hp;
    std::uint64_t seed;
};

std::vector<RunOutcome> run_jobs(const RunConfig& cfg, const std::vector<Job>& jobs,
                                 std::ostream& log) {
    std::vector<std::optional<RunOutcome>> slots(jobs.size());
    std::mutex log_mutex;
    parallel_for(jobs.size(), effective_jobs(cfg.jobs), [&](std::size_t i) {
        const Job& job = jobs[i];
        slots[i] = run_training(*job.data, job.hp, cfg.train_config(job.seed));
        std::lock_guard lock(log_mutex);
        log << "  [" << (i + 1) << "/" << jobs.size() << "] " << variant_name(job.hp.variant)
            << " T=" << job.hp.T << " m=" << job.hp.m << " seed=" << job.seed
            << " valid_rmse=" << slots[i]->valid.rmse << " test_rmse=" << slots[i]->test.rmse
            << '\n';
    });
    std::vector<RunOutcome> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

void write_run(const fs::path& dir, const RunOutcome& run) {
    fs::create_directories(dir);
    run.model.store().save_file(dir / "model.params");
    write_json(dir / "train_report.json", to_json(run.report));
    write_json(dir / "metrics.json",
               {{"train", to_json(run.train)}, {"valid", to_json(run.valid)},
                {"test", to_json(run.test)}});
}

const std::vector<DrivingWindow>& split_windows(const PreparedData& data, const std::string& name) {
    if (name == "train") return data.train;
    if (name == "valid") return data.valid;
    return data.test;
}

Model load_snapshot(const RunConfig& cfg, std::size_t n_series) {
    return Model::from_store(cfg.hyperparams(n_series), ParameterStore::load_file(cfg.model));
}

}  // namespace

int cmd_train(const RunConfig& cfg, std::ostream& log) {
    cfg.validate_for(Command::Train);
    const PreparedData data = load_prepared(cfg, cfg.T);
    const Hyperparams hp = cfg.hyperparams(data.scaled.series_count());
    hp.validate();
    fs::create_directories(cfg.output_dir);
    log << "train: " << variant_name(hp.variant) << " n=" << hp.n << " T=" << hp.T
        << " m=" << hp.m << " p=" << hp.p << " windows " << data.train.size() << "/"
        << data.valid.size() << "/" << data.test.size() << '\n';

    std::vector<Job> jobs;
    for (std::uint64_t seed : cfg.seeds) jobs.push_back({&data, hp, seed});
    const auto runs = run_jobs(cfg, jobs, log);

    std::vector<const RunOutcome*> ptrs;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        write_run(cfg.output_dir / ("seed_" + std::to_string(cfg.seeds[i])), runs[i]);
        ptrs.push_back(&runs[i]);
    }
    json agg = aggregate_json(ptrs);
    agg["variant"] = variant_name(hp.variant);
    agg["T"] = hp.T;
    agg["m"] = hp.m;
    agg["p"] = hp.p;
    agg["seeds"] = cfg.seeds;
    write_json(cfg.output_dir / "aggregate.json", agg);
    log << "test rmse mean " << agg["test"]["rmse"]["mean"].get<double>() << " std "
        << agg["test"]["rmse"]["std"].get<double>() << '\n';
    return 0;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
    cfg.validate_for(Command::Evaluate);
    const PreparedData data = load_prepared(cfg, cfg.T);
    const Model model = load_snapshot(cfg, data.scaled.series_count());
    const MetricsRecord train = evaluate(model, data.train, data.stats);
    const MetricsRecord valid = evaluate(model, data.valid, data.stats);
    const MetricsRecord test = evaluate(model, data.test, data.stats);
    fs::create_directories(cfg.output_dir);
    write_json(cfg.output_dir / "metrics.json",
               {{"train", to_json(train)}, {"valid", to_json(valid)}, {"test", to_json(test)}});
    log << "evaluate: test rmse " << test.rmse << " mae " << test.mae << " mape "
        << test.mape_percent << "%\n";
    return 0;
}

int cmd_grid_search(const RunConfig& cfg, std::ostream& log) {
    cfg.validate_for(Command::GridSearch);
    const RawSeries raw = load_csv(cfg.dataset, cfg.target_column);
    const SplitSpec splits = splits_for(cfg, raw.length());
    std::map<std::size_t, PreparedData> by_T;
    for (std::size_t T : cfg.grid_T) {
        if (!by_T.count(T)) by_T.emplace(T, prepare_data(raw, splits, T, cfg.normalization));
    }
    fs::create_directories(cfg.output_dir);

    std::vector<Job> jobs;
    for (std::size_t T : cfg.grid_T) {
        for (std::size_t h : cfg.grid_m) {
            for (std::uint64_t seed : cfg.seeds) {
                jobs.push_back({&by_T.at(T), {T, raw.series_count(), h, h, cfg.variant}, seed});
            }
        }
    }
    log << "grid-search: " << jobs.size() << " runs\n";
    const auto runs = run_jobs(cfg, jobs, log);

    // Selection by mean validation RMSE over seeds.
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> valid_by_point;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> test_by_point;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        valid_by_point[{jobs[i].hp.T, jobs[i].hp.m}].push_back(runs[i].valid.rmse);
        test_by_point[{jobs[i].hp.T, jobs[i].hp.m}].push_back(runs[i].test.rmse);
    }
    std::pair<std::size_t, std::size_t> best{};
    double best_rmse = std::numeric_limits<double>::infinity();
    for (const auto& [point, values] : valid_by_point) {
        const double mean = summarize(values).mean;
        if (mean < best_rmse) {
            best_rmse = mean;
            best = point;
        }
    }

    auto rows = open_csv(cfg.output_dir / "grid.csv",
                         "T,m,seed,valid_rmse,test_rmse,valid_mae,test_mae,valid_mape,test_mape,best");
    json rows_json = json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& r = runs[i];
        const bool is_best = std::pair{jobs[i].hp.T, jobs[i].hp.m} == best;
        rows << jobs[i].hp.T << ',' << jobs[i].hp.m << ',' << jobs[i].seed << ','
             << fmt17(r.valid.rmse) << ',' << fmt17(r.test.rmse) << ',' << fmt17(r.valid.mae)
             << ',' << fmt17(r.test.mae) << ',' << fmt17(r.valid.mape_percent) << ','
             << fmt17(r.test.mape_percent) << ',' << (is_best ? 1 : 0) << '\n';
        rows_json.push_back({{"T", jobs[i].hp.T}, {"m", jobs[i].hp.m}, {"seed", jobs[i].seed},
                             {"valid", to_json(r.valid)}, {"test", to_json(r.test)}});
    }
    auto summary = open_csv(cfg.output_dir / "grid_summary.csv",
                            "T,m,mean_valid_rmse,std_valid_rmse,mean_test_rmse,best");
    for (const auto& [point, values] : valid_by_point) {
        const SeedSummary v = summarize(values);
        summary << point.first << ',' << point.second << ',' << fmt17(v.mean) << ','
                << fmt17(v.std) << ',' << fmt17(summarize(test_by_point[point]).mean) << ','
                << (point == best ? 1 : 0) << '\n';
    }
    write_json(cfg.output_dir / "grid.json",
               {{"best", {{"T", best.first}, {"m", best.second}, {"mean_valid_rmse", best_rmse}}},
                {"rows", rows_json}});
    log << "best: T=" << best.first << " m=p=" << best.second << " mean valid rmse " << best_rmse
        << '\n';
    return 0;
}

int cmd_ablation(const RunConfig& cfg, std::ostream& log) {
    cfg.validate_for(Command::Ablation);
    const PreparedData data = load_prepared(cfg, cfg.T);
    fs::create_directories(cfg.output_dir);
    std::vector<Job> jobs;
    for (ModelVariant v : cfg.variants) {
        for (std::uint64_t seed : cfg.seeds) {
            jobs.push_back({&data, {cfg.T, data.scaled.series_count(), cfg.m, cfg.p, v}, seed});
        }
    }
    log << "ablation: " << cfg.variants.size() << " variants x " << cfg.seeds.size() << " seeds\n";
    const auto runs = run_jobs(cfg, jobs, log);

    auto rows = open_csv(cfg.output_dir / "ablation.csv",
                         "variant,seed,valid_rmse,test_rmse,test_mae,test_mape");
    std::map<ModelVariant, std::vector<const RunOutcome*>> by_variant;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& r = runs[i];
        rows << variant_name(jobs[i].hp.variant) << ',' << jobs[i].seed << ','
             << fmt17(r.valid.rmse) << ',' << fmt17(r.test.rmse) << ',' << fmt17(r.test.mae)
             << ',' << fmt17(r.test.mape_percent) << '\n';
        by_variant[jobs[i].hp.variant].push_back(&r);
    }
    json out = json::object();
    for (ModelVariant v : cfg.variants) {
        out[std::string(variant_name(v))] = aggregate_json(by_variant[v]);
    }
    write_json(cfg.output_dir / "ablation.json", out);
    for (ModelVariant v : cfg.variants) {
        const std::string name(variant_name(v));
        log << "  " << std::setw(16) << std::left << name << " test rmse "
            << out[name]["test"]["rmse"]["mean"].get<double>() << '\n';
    }
    return 0;
}

int cmd_robustness(const RunConfig& cfg, std::ostream& log) {
    cfg.validate_for(Command::Robustness);
    const RawSeries raw = load_csv(cfg.dataset, cfg.target_column);
    const RawSeries noisy_raw = inject_noise_series(raw, cfg.noise_seed);
    const SplitSpec splits = splits_for(cfg, raw.length());
    const PreparedData clean = prepare_data(raw, splits, cfg.T, cfg.normalization);
    const PreparedData noisy = prepare_data(noisy_raw, splits, cfg.T, cfg.normalization);
    const std::size_t n = raw.series_count();
    fs::create_directories(cfg.output_dir);

    std::vector<Job> jobs;
    for (std::uint64_t seed : cfg.seeds) {
        jobs.push_back({&clean, {cfg.T, n, cfg.m, cfg.p, cfg.variant}, seed});
        jobs.push_back({&noisy, {cfg.T, 2 * n, cfg.m, cfg.p, cfg.variant}, seed});
    }
    log << "robustness: " << n << " original + " << n << " permuted series\n";
    const auto runs = run_jobs(cfg, jobs, log);

    std::vector<std::size_t> original(n), permuted(n);
    for (std::size_t k = 0; k < n; ++k) {
        original[k] = k;
        permuted[k] = n + k;
    }
    // Known driver indices (1-based) are summarized separately when given.
    std::vector<std::size_t> relevant, relevant_perm;
    if (cfg.explicitly_set.count("relevant")) {
        for (std::size_t r : cfg.relevant) {
            if (r == 0 || r > n) throw ConfigError("relevant index " + std::to_string(r) + " outside 1.." + std::to_string(n));
            relevant.push_back(r - 1);
            relevant_perm.push_back(n + r - 1);
        }
    }
    auto summary = open_csv(cfg.output_dir / "attention_summary.csv", "seed,stage,t,group,mean_alpha");
    json attention = json::array();
    std::vector<const RunOutcome*> clean_runs, noisy_runs;
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
        clean_runs.push_back(&runs[2 * s]);
        noisy_runs.push_back(&runs[2 * s + 1]);
        const Model untrained = Model::build(runs[2 * s + 1].model.hyperparams(), cfg.seeds[s]);
        const std::pair<const char*, const Model*> stages[] = {
            {"untrained", &untrained}, {"trained", &runs[2 * s + 1].model}};
        for (const auto& [stage, model] : stages) {
            const Mat alpha = mean_input_attention(*model, noisy.test);
            const auto orig = group_mean(alpha, original);
            const auto perm = group_mean(alpha, permuted);
            for (std::size_t t = 0; t < cfg.T; ++t) {
                summary << cfg.seeds[s] << ',' << stage << ',' << (t + 1) << ",original,"
                        << fmt17(orig[t]) << '\n';
                summary << cfg.seeds[s] << ',' << stage << ',' << (t + 1) << ",noisy,"
                        << fmt17(perm[t]) << '\n';
            }
            json entry = {{"seed", cfg.seeds[s]},
                          {"stage", stage},
                          {"original_mean", summarize(orig).mean},
                          {"noisy_mean", summarize(perm).mean}};
            if (!relevant.empty()) {
                entry["relevant_mean"] = summarize(group_mean(alpha, relevant)).mean;
                entry["relevant_noisy_mean"] = summarize(group_mean(alpha, relevant_perm)).mean;
            }
            attention.push_back(entry);
        }
    }
    const json clean_agg = aggregate_json(clean_runs);
    const json noisy_agg = aggregate_json(noisy_runs);
    const double ratio = noisy_agg["test"]["rmse"]["mean"].get<double>() /
                         clean_agg["test"]["rmse"]["mean"].get<double>();
    write_json(cfg.output_dir / "robustness.json", {{"clean", clean_agg},
                                                    {"noisy", noisy_agg},
                                                    {"test_rmse_ratio", ratio},
                                                    {"attention", attention}});
    log << "noisy/clean test rmse ratio " << ratio << '\n';
    return 0;
}

int cmd_dump_attention(const RunConfig& cfg, std::ostream& log) {
    cfg.validate_for(Command::DumpAttention);
    const PreparedData data = load_prepared(cfg, cfg.T);
    const Model model = load_snapshot(cfg, data.scaled.series_count());
    const auto& windows = split_windows(data, cfg.split);
    const std::size_t end = cfg.window_end == 0 ? cfg.window_begin + 1 : cfg.window_end;
    if (end > windows.size()) {
        throw ArgumentError("window range [" + std::to_string(cfg.window_begin) + ", " +
                            std::to_string(end) + ") exceeds the " + std::to_string(windows.size()) +
                            " windows of split '" + cfg.split + "'");
    }
    const fs::path dir = cfg.output_dir / "attention";
    fs::create_directories(dir);
    auto preds = open_csv(cfg.output_dir / "predictions.csv", "index,y_true,y_pred");
    for (std::size_t i = cfg.window_begin; i < end; ++i) {
        const DrivingWindow& w = windows[i];
        const ForwardResult r = forward(model, w);
        const std::string tag = std::to_string(w.target_index);
        if (r.encoder && r.encoder->alphas) {
            auto out = open_csv(dir / ("alpha_" + tag + ".csv"), "t,series_index,alpha");
            const Mat& a = *r.encoder->alphas;
            for (std::size_t t = 0; t < a.cols(); ++t) {
                for (std::size_t k = 0; k < a.rows(); ++k) {
                    out << (t + 1) << ',' << (k + 1) << ',' << fmt17(a(k, t)) << '\n';
                }
            }
        }
        if (r.decoder && !r.decoder->betas.empty()) {
            auto out = open_csv(dir / ("beta_" + tag + ".csv"), "decoder_t,encoder_i,beta");
            for (std::size_t t = 0; t < r.decoder->betas.size(); ++t) {
                const Vec& b = r.decoder->betas[t];
                for (std::size_t j = 0; j < b.size(); ++j) {
                    out << (t + 1) << ',' << (j + 1) << ',' << fmt17(b[j]) << '\n';
                }
            }
        }
        preds << w.target_index << ',' << fmt17(data.stats.target_to_original(w.y_target)) << ','
              << fmt17(data.stats.target_to_original(r.prediction)) << '\n';
    }
    log << "dump-attention: wrote " << (end - cfg.window_begin) << " windows to " << dir.string()
        << '\n';
    return 0;
}

int cmd_grad_check(const RunConfig& cfg, std::ostream& log) {
    cfg.validate_for(Command::GradCheck);
    const Hyperparams dims = cfg.grad_check_dims();
    fs::create_directories(cfg.output_dir);
    json out = json::object();
    bool all_passed = true;
    log << "grad-check: T=" << dims.T << " n=" << dims.n << " m=p=" << dims.m << " step "
        << cfg.step << " tol " << cfg.tol << '\n';
    for (ModelVariant v : cfg.variants) {
        Hyperparams hp = dims;
        hp.variant = v;
        GradCheckCase c = make_grad_check_case(hp, cfg.seed);
        const GradCheckReport report = check_model_gradients(c, cfg.step, cfg.tol);
        const std::string name(variant_name(v));
        log << name << (report.passed() ? "  PASS" : "  FAIL") << "  worst " << report.worst()
            << '\n';
        json entries = json::object();
        for (const auto& e : report.entries) {
            const bool ok = e.max_rel_error <= cfg.tol;
            log << "  " << (ok ? "   " : "!! ") << std::setw(16) << std::left << e.name << ' '
                << e.max_rel_error << '\n';
            entries[e.name] = {{"max_rel_error", e.max_rel_error},
                               {"worst_index", e.worst_index},
                               {"analytic", e.analytic},
                               {"numeric", e.numeric}};
        }
        out[name] = {{"passed", report.passed()}, {"worst", report.worst()}, {"entries", entries}};
        all_passed = all_passed && report.passed();
    }
    write_json(cfg.output_dir / "grad_check.json", out);
    log << (all_passed ? "all gradient checks passed" : "gradient check FAILED") << '\n';
    return all_passed ? 0 : 1;
}

int cmd_synth(const RunConfig& cfg, std::ostream& log) {
    cfg.validate_for(Command::SynthData);
    const RawSeries series = synth_narx(cfg.n, cfg.L, cfg.relevant, cfg.noise_std, cfg.seed);
    fs::create_directories(cfg.output_dir);
    const fs::path path = cfg.output_dir / cfg.synth_file;
    write_csv(series, path);
    log << "synth-data: wrote " << cfg.L << " rows x " << cfg.n << " driving series to "
        << path.string() << " (target column '" << series.target_name << "')\n";
    return 0;
}

int run_command(Command command, const RunConfig& cfg, std::ostream& log) {
    switch (command) {
        case Command::Train: return cmd_train(cfg, log);
        case Command::Evaluate: return cmd_evaluate(cfg, log);
        case Command::GridSearch: return cmd_grid_search(cfg, log);
        case Command::Ablation: return cmd_ablation(cfg, log);
        case Command::Robustness: return cmd_robustness(cfg, log);
        case Command::DumpAttention: return cmd_dump_attention(cfg, log);
        case Command::GradCheck: return cmd_grad_check(cfg, log);
        case Command::SynthData: return cmd_synth(cfg, log);
    }
    return 2;
}

}  // namespace narx
