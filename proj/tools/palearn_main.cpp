#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "palearn/errors.hpp"
#include "palearn/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int cmd_gen_data(const std::string& spec_path, const std::string& out_train,
                 const std::string& out_test) {
    const palearn::CohortSpec spec = palearn::parse_cohort_spec_file(spec_path);
    const palearn::Cohort cohort = palearn::generate_cohort(spec);
    palearn::write_dataset_csv(cohort.train, out_train);
    palearn::write_dataset_csv(cohort.test, out_test);
    std::printf("wrote %zu train samples to %s\n", cohort.train.size(), out_train.c_str());
    std::printf("wrote %zu test samples to %s\n", cohort.test.size(), out_test.c_str());
    return kExitOk;
}

int cmd_run(const std::string& config_path, bool patient_aware_flag, bool warm_start_flag,
            const std::string& strategy_override, const std::string& seeds_override,
            const std::string& out_override) {
    palearn::ExperimentConfig cfg = palearn::parse_experiment_config(config_path);
    if (patient_aware_flag) cfg.patient_aware = true;
    if (warm_start_flag) cfg.warm_start = true;
    if (!strategy_override.empty()) cfg.strategy = palearn::strategy_from_name(strategy_override);
    if (!seeds_override.empty()) {
        cfg.seeds.clear();
        std::string::size_type start = 0;
        while (start <= seeds_override.size()) {
            auto pos = seeds_override.find(',', start);
            if (pos == std::string::npos) pos = seeds_override.size();
            const std::string item = seeds_override.substr(start, pos - start);
            if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
                throw palearn::ConfigError("invalid --seeds value '" + seeds_override + "'");
            cfg.seeds.push_back(std::strtoull(item.c_str(), nullptr, 10));
            start = pos + 1;
        }
    }
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (cfg.out_dir.empty())
        throw palearn::ConfigError("no output directory: set out_dir in the config or pass --out");

    const palearn::Cohort cohort = palearn::resolve_datasets(cfg);
    std::printf("dataset: %zu train / %zu test samples, %d classes, dim %zu\n",
                cohort.train.size(), cohort.test.size(), cohort.train.num_classes,
                cohort.train.feature_dim);
    std::printf("strategy: %s%s, b0=%zu, k=%zu, rounds=%zu, %zu seed(s)\n",
                palearn::strategy_name(cfg.strategy).c_str(),
                cfg.patient_aware ? " (patient-aware)" : "", cfg.initial_budget, cfg.per_round_k,
                cfg.num_rounds, cfg.seeds.size());

    const std::vector<palearn::SeedRun> runs =
        palearn::run_experiment(cfg, cohort.train, cohort.test);
    palearn::write_experiment_outputs(cfg, cohort.train, runs, cfg.out_dir);

    bool any_failed = false;
    for (const palearn::SeedRun& run : runs) {
        if (run.ok()) {
            std::printf("seed %llu: %zu rounds, final accuracy %.4f\n",
                        static_cast<unsigned long long>(run.seed), run.rounds.size(),
                        run.rounds.back().test_accuracy);
        } else {
            std::printf("seed %llu: FAILED (%s)\n", static_cast<unsigned long long>(run.seed),
                        run.error.c_str());
            any_failed = true;
        }
    }
    std::printf("outputs written to %s\n", cfg.out_dir.c_str());
    return any_failed ? kExitRuntime : kExitOk;
}

int cmd_summarize(const std::string& dir) {
    const std::vector<palearn::NamedCurve> curves = palearn::load_curves(dir);
    std::vector<std::vector<palearn::RoundRecord>> per_seed;
    per_seed.reserve(curves.size());
    for (const palearn::NamedCurve& c : curves) per_seed.push_back(c.rounds);
    const std::vector<palearn::SummaryRow> rows = palearn::summarize(per_seed);
    const std::string out = dir + "/summary.csv";
    palearn::write_summary_csv(out, rows);
    std::printf("summarized %zu curve(s) into %s\n", curves.size(), out.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"patient-aware active learning experiments"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-data", "generate a synthetic patient cohort as CSV");
    std::string spec_path, out_train, out_test;
    gen->add_option("--spec", spec_path, "cohort spec file (key = value)")->required();
    gen->add_option("--out-train", out_train, "output path for the train CSV")->required();
    gen->add_option("--out-test", out_test, "output path for the test CSV")->required();

    auto* run = app.add_subcommand("run", "run an active-learning experiment grid");
    std::string config_path, strategy_override, seeds_override, out_override;
    bool patient_aware_flag = false;
    bool warm_start_flag = false;
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_flag("--patient-aware", patient_aware_flag,
                  "wrap the base strategy with patient-aware selection");
    run->add_flag("--warm-start", warm_start_flag,
                  "keep model weights across rounds instead of re-initializing");
    run->add_option("--strategy", strategy_override,
                    "override strategy: random|least_confidence|margin|entropy|badge");
    run->add_option("--seeds", seeds_override, "override seeds, comma-separated");
    run->add_option("--out", out_override, "output directory (overrides out_dir)");

    auto* summ = app.add_subcommand("summarize", "recompute summary.csv from curve files");
    std::string summarize_dir;
    summ->add_option("dir", summarize_dir, "directory holding curve_seed<N>.csv files")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(spec_path, out_train, out_test);
        if (run->parsed())
            return cmd_run(config_path, patient_aware_flag, warm_start_flag, strategy_override,
                           seeds_override, out_override);
        return cmd_summarize(summarize_dir);
    } catch (const palearn::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const palearn::SpecError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}
