#include "palearn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "palearn/errors.hpp"

namespace fs = std::filesystem;

namespace palearn {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

struct ConfigLine {
    std::string key, value;
    std::size_t line_no;
};

std::vector<ConfigLine> read_config_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::vector<ConfigLine> lines;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string stripped = trim(raw);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value' at line " + std::to_string(line_no) +
                              " of '" + path + "'");
        ConfigLine cl{trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)), line_no};
        if (cl.key.empty()) throw ConfigError("empty key at line " + std::to_string(line_no));
        lines.push_back(std::move(cl));
    }
    return lines;
}

[[noreturn]] void bad_value(const ConfigLine& cl) {
    throw ConfigError("invalid value '" + cl.value + "' for key '" + cl.key + "' (line " +
                      std::to_string(cl.line_no) + ")");
}

double to_double(const ConfigLine& cl) {
    char* end = nullptr;
    const double v = std::strtod(cl.value.c_str(), &end);
    if (cl.value.empty() || end != cl.value.c_str() + cl.value.size()) bad_value(cl);
    return v;
}

std::uint64_t to_u64(const ConfigLine& cl) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(cl.value.c_str(), &end, 10);
    if (cl.value.empty() || end != cl.value.c_str() + cl.value.size() ||
        cl.value.find('-') != std::string::npos)
        bad_value(cl);
    return v;
}

long to_long(const ConfigLine& cl) {
    char* end = nullptr;
    const long v = std::strtol(cl.value.c_str(), &end, 10);
    if (cl.value.empty() || end != cl.value.c_str() + cl.value.size()) bad_value(cl);
    return v;
}

bool to_bool(const ConfigLine& cl) {
    if (cl.value == "true" || cl.value == "1") return true;
    if (cl.value == "false" || cl.value == "0") return false;
    bad_value(cl);
}

template <typename T, typename Fn>
std::vector<T> to_list(const ConfigLine& cl, Fn parse_one) {
    std::vector<T> out;
    std::string::size_type start = 0;
    while (start <= cl.value.size()) {
        auto pos = cl.value.find(',', start);
        if (pos == std::string::npos) pos = cl.value.size();
        ConfigLine item{cl.key, trim(cl.value.substr(start, pos - start)), cl.line_no};
        if (item.value.empty()) bad_value(cl);
        out.push_back(parse_one(item));
        start = pos + 1;
    }
    return out;
}

// Applies one cohort-spec key; returns false when the key is not recognized.
bool apply_cohort_key(CohortSpec& spec, const std::string& key, const ConfigLine& cl) {
    if (key == "num_classes") spec.num_classes = static_cast<int>(to_long(cl));
    else if (key == "num_patients") spec.num_patients = static_cast<int>(to_long(cl));
    else if (key == "feature_dim") spec.feature_dim = static_cast<std::size_t>(to_u64(cl));
    else if (key == "class_separation") spec.class_separation = to_double(cl);
    else if (key == "patient_offset_scale") spec.patient_offset_scale = to_double(cl);
    else if (key == "noise_scale") spec.noise_scale = to_double(cl);
    else if (key == "size_alpha") spec.size_alpha = to_double(cl);
    else if (key == "min_samples_per_patient") spec.min_samples_per_patient = static_cast<int>(to_long(cl));
    else if (key == "max_samples_per_patient") spec.max_samples_per_patient = static_cast<int>(to_long(cl));
    else if (key == "test_patient_fraction") spec.test_patient_fraction = to_double(cl);
    else if (key == "seed") spec.seed = to_u64(cl);
    else if (key == "class_weights")
        spec.class_weights = to_list<double>(cl, [](const ConfigLine& c) { return to_double(c); });
    else return false;
    return true;
}

bool apply_model_key(ModelConfig& model, const std::string& key, const ConfigLine& cl) {
    if (key == "hidden_units") model.hidden_units = static_cast<std::size_t>(to_u64(cl));
    else if (key == "learning_rate") model.learning_rate = to_double(cl);
    else if (key == "adam_beta1") model.adam_beta1 = to_double(cl);
    else if (key == "adam_beta2") model.adam_beta2 = to_double(cl);
    else if (key == "adam_eps") model.adam_eps = to_double(cl);
    else if (key == "batch_size") model.batch_size = static_cast<std::size_t>(to_u64(cl));
    else if (key == "target_train_accuracy") model.target_train_accuracy = to_double(cl);
    else if (key == "max_epochs") model.max_epochs = static_cast<std::size_t>(to_u64(cl));
    else return false;
    return true;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& path) {
    ExperimentConfig cfg;
    bool has_gen = false;
    CohortSpec gen;

    for (const ConfigLine& cl : read_config_lines(path)) {
        const std::string& key = cl.key;
        if (key == "strategy") cfg.strategy = strategy_from_name(cl.value);
        else if (key == "patient_aware") cfg.patient_aware = to_bool(cl);
        else if (key == "patient_pick") cfg.patient_pick = patient_pick_from_name(cl.value);
        else if (key == "warm_start") cfg.warm_start = to_bool(cl);
        else if (key == "initial_budget") cfg.initial_budget = static_cast<std::size_t>(to_u64(cl));
        else if (key == "per_round_k") cfg.per_round_k = static_cast<std::size_t>(to_u64(cl));
        else if (key == "num_rounds") cfg.num_rounds = static_cast<std::size_t>(to_u64(cl));
        else if (key == "seeds")
            cfg.seeds = to_list<std::uint64_t>(cl, [](const ConfigLine& c) { return to_u64(c); });
        else if (key == "out_dir") cfg.out_dir = cl.value;
        else if (key == "train_csv") cfg.train_csv = cl.value;
        else if (key == "test_csv") cfg.test_csv = cl.value;
        else if (key.rfind("gen.", 0) == 0) {
            if (!apply_cohort_key(gen, key.substr(4), cl))
                throw ConfigError("unknown key '" + key + "' (line " + std::to_string(cl.line_no) + ")");
            has_gen = true;
        } else if (key.rfind("model.", 0) == 0) {
            if (!apply_model_key(cfg.model, key.substr(6), cl))
                throw ConfigError("unknown key '" + key + "' (line " + std::to_string(cl.line_no) + ")");
        } else {
            throw ConfigError("unknown key '" + key + "' (line " + std::to_string(cl.line_no) + ")");
        }
    }
    if (has_gen) cfg.generate = gen;
    return cfg;
}

CohortSpec parse_cohort_spec_file(const std::string& path) {
    CohortSpec spec;
    for (const ConfigLine& cl : read_config_lines(path))
        if (!apply_cohort_key(spec, cl.key, cl))
            throw ConfigError("unknown key '" + cl.key + "' (line " + std::to_string(cl.line_no) + ")");
    return spec;
}

Cohort resolve_datasets(const ExperimentConfig& cfg) {
    const bool has_csv = !cfg.train_csv.empty() || !cfg.test_csv.empty();
    if (cfg.generate.has_value() && has_csv)
        throw ConfigError("config sets both gen.* and train_csv/test_csv; pick one dataset source");
    if (cfg.generate.has_value()) return generate_cohort(*cfg.generate);
    if (cfg.train_csv.empty() || cfg.test_csv.empty())
        throw ConfigError("config needs either gen.* keys or both train_csv and test_csv");
    Cohort cohort;
    cohort.train = load_dataset_csv(cfg.train_csv);
    cohort.test = load_dataset_csv(cfg.test_csv, cohort.train.num_classes);
    return cohort;
}

namespace {

std::vector<RoundRecord> run_single_seed(const ExperimentConfig& cfg, const Dataset& train,
                                         const Dataset& test, std::uint64_t seed) {
    Rng rng_pool = derive_rng(seed, Stream::PoolSeed);
    Rng rng_init = derive_rng(seed, Stream::ModelInit);
    Rng rng_train = derive_rng(seed, Stream::TrainShuffle);
    Rng rng_sel = derive_rng(seed, Stream::Selection);

    PoolState pool = seed_initial(make_unlabeled_pool(train), cfg.initial_budget, rng_pool);
    const ModelState initial =
        init_model(cfg.model, train.feature_dim, static_cast<std::size_t>(train.num_classes),
                   rng_init);
    ModelState carried = initial;

    std::vector<RoundRecord> records;
    records.reserve(cfg.num_rounds + 1);
    for (std::size_t r = 0; r <= cfg.num_rounds; ++r) {
        std::vector<Sample> labeled;
        labeled.reserve(pool.labeled_ids.size());
        for (int id : pool.labeled_ids) labeled.push_back(train.samples[static_cast<std::size_t>(id)]);

        ModelState start_state = cfg.warm_start ? std::move(carried) : initial;
        auto [trained, report] =
            train_to_threshold(std::move(start_state), labeled, cfg.model, rng_train);

        RoundRecord rec;
        rec.round = r;
        rec.labeled_count = pool.labeled_ids.size();
        rec.test_accuracy = evaluate_accuracy(trained, test.samples);
        rec.epochs_run = report.epochs_run;
        rec.threshold_reached = report.threshold_reached;

        if (r < cfg.num_rounds) {
            if (cfg.patient_aware) {
                PatientAwareConfig pa;
                pa.base_strategy = cfg.strategy;
                pa.k = cfg.per_round_k;
                pa.allow_refill = true;
                pa.patient_pick = cfg.patient_pick;
                rec.selected_ids = patient_aware_select(pa, trained, pool, train, rng_sel);
            } else {
                rec.selected_ids =
                    select_batch(cfg.strategy, trained, pool, train, cfg.per_round_k, rng_sel);
            }
            pool = label_samples(pool, rec.selected_ids);
        }
        if (cfg.warm_start) carried = std::move(trained);
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace

std::vector<SeedRun> run_experiment(const ExperimentConfig& cfg, const Dataset& train,
                                    const Dataset& test) {
    validate_dataset(train);
    validate_dataset(test);
    validate_model_config(cfg.model);
    if (cfg.seeds.empty()) throw ConfigError("seeds must be non-empty");
    if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size())
        throw ConfigError("seeds must be distinct");
    if (train.num_classes != test.num_classes || train.feature_dim != test.feature_dim)
        throw ConfigError("train/test datasets disagree on classes or feature dimension");
    if (cfg.initial_budget < 1) throw ConfigError("initial_budget must be >= 1");
    if (cfg.num_rounds > 0 && cfg.per_round_k < 1)
        throw ConfigError("per_round_k must be >= 1 when num_rounds > 0");
    if (cfg.initial_budget + cfg.num_rounds * cfg.per_round_k > train.size())
        throw ConfigError("budget path " + std::to_string(cfg.initial_budget) + " + " +
                          std::to_string(cfg.num_rounds) + " * " + std::to_string(cfg.per_round_k) +
                          " exceeds train pool size " + std::to_string(train.size()));

    std::vector<SeedRun> runs;
    runs.reserve(cfg.seeds.size());
    for (std::uint64_t seed : cfg.seeds) {
        SeedRun run;
        run.seed = seed;
        try {
            run.rounds = run_single_seed(cfg, train, test, seed);
        } catch (const std::exception& e) {
            run.error = e.what();  // recorded, the rest of the grid continues
            run.rounds.clear();
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

std::vector<SummaryRow> summarize(const std::vector<std::vector<RoundRecord>>& per_seed) {
    if (per_seed.empty()) throw ShapeError("no curves to summarize");
    const std::size_t rounds = per_seed.front().size();
    for (const auto& curve : per_seed) {
        if (curve.size() != rounds)
            throw ShapeError("curves have different round counts (" + std::to_string(curve.size()) +
                             " vs " + std::to_string(rounds) + ")");
        for (std::size_t t = 0; t < rounds; ++t)
            if (curve[t].labeled_count != per_seed.front()[t].labeled_count ||
                curve[t].round != per_seed.front()[t].round)
                throw ShapeError("curves disagree on round structure at round " + std::to_string(t));
    }

    const double n = static_cast<double>(per_seed.size());
    std::vector<SummaryRow> rows;
    rows.reserve(rounds);
    for (std::size_t t = 0; t < rounds; ++t) {
        SummaryRow row;
        row.round = per_seed.front()[t].round;
        row.labeled_count = per_seed.front()[t].labeled_count;
        double sum = 0.0;
        for (const auto& curve : per_seed) sum += curve[t].test_accuracy;
        row.mean_acc = sum / n;
        if (per_seed.size() > 1) {
            double ss = 0.0;
            for (const auto& curve : per_seed) {
                const double d = curve[t].test_accuracy - row.mean_acc;
                ss += d * d;
            }
            row.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        }
        rows.push_back(row);
    }
    return rows;
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "round,labeled_count,mean_acc,stderr\n";
    for (const SummaryRow& row : rows)
        out << row.round << ',' << row.labeled_count << ',' << g17(row.mean_acc) << ','
            << g17(row.std_error) << "\n";
}

void write_experiment_outputs(const ExperimentConfig& cfg, const Dataset& train,
                              const std::vector<SeedRun>& runs, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    std::vector<const SeedRun*> ok_runs;
    for (const SeedRun& run : runs)
        if (run.ok()) ok_runs.push_back(&run);
    std::sort(ok_runs.begin(), ok_runs.end(),
              [](const SeedRun* a, const SeedRun* b) { return a->seed < b->seed; });

    for (const SeedRun* run : ok_runs) {
        const std::string tag = std::to_string(run->seed);
        std::ofstream curve(dir / ("curve_seed" + tag + ".csv"), std::ios::binary);
        curve << "round,labeled_count,test_accuracy,epochs_run\n";
        std::ofstream sel(dir / ("selections_seed" + tag + ".csv"), std::ios::binary);
        sel << "round,sample_id,patient_id\n";
        for (const RoundRecord& rec : run->rounds) {
            curve << rec.round << ',' << rec.labeled_count << ',' << g17(rec.test_accuracy) << ','
                  << rec.epochs_run << "\n";
            for (int id : rec.selected_ids)
                sel << rec.round << ',' << id << ','
                    << train.samples[static_cast<std::size_t>(id)].patient_id << "\n";
        }
    }

    if (!ok_runs.empty()) {
        std::vector<std::vector<RoundRecord>> curves;
        curves.reserve(ok_runs.size());
        for (const SeedRun* run : ok_runs) curves.push_back(run->rounds);
        write_summary_csv((dir / "summary.csv").string(), summarize(curves));
    }

    bool any_failed = false;
    for (const SeedRun& run : runs) any_failed |= !run.ok();
    if (any_failed) {
        std::ofstream fail(dir / "failures.csv", std::ios::binary);
        fail << "seed,error\n";
        for (const SeedRun& run : runs) {
            if (run.ok()) continue;
            std::string msg = run.error;
            for (char& c : msg)
                if (c == ',' || c == '\n' || c == '"') c = ';';
            fail << run.seed << ',' << msg << "\n";
        }
    }
    (void)cfg;
}

std::vector<NamedCurve> load_curves(const std::string& dir) {
    std::vector<NamedCurve> curves;
    if (!fs::is_directory(dir)) throw ParseError("'" + dir + "' is not a directory");
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("curve_seed", 0) != 0 || name.size() <= 14 ||
            name.substr(name.size() - 4) != ".csv")
            continue;
        const std::string digits = name.substr(10, name.size() - 14);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) continue;

        NamedCurve curve;
        curve.seed = std::strtoull(digits.c_str(), nullptr, 10);

        std::ifstream in(entry.path());
        if (!in) throw ParseError("cannot open '" + entry.path().string() + "'");
        std::string line;
        std::size_t line_no = 1;
        if (!std::getline(in, line)) throw ParseError("empty curve file '" + name + "'", 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line) != "round,labeled_count,test_accuracy,epochs_run")
            throw ParseError("unexpected header in '" + name + "'", 1);
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (trim(line).empty()) continue;
            RoundRecord rec;
            char* cursor = line.data();
            char* end = nullptr;
            rec.round = std::strtoull(cursor, &end, 10);
            if (end == cursor || *end != ',') throw ParseError("bad row in '" + name + "'", line_no);
            cursor = end + 1;
            rec.labeled_count = std::strtoull(cursor, &end, 10);
            if (end == cursor || *end != ',') throw ParseError("bad row in '" + name + "'", line_no);
            cursor = end + 1;
            rec.test_accuracy = std::strtod(cursor, &end);
            if (end == cursor || *end != ',') throw ParseError("bad row in '" + name + "'", line_no);
            cursor = end + 1;
            rec.epochs_run = std::strtoull(cursor, &end, 10);
            if (end == cursor || *end != '\0') throw ParseError("bad row in '" + name + "'", line_no);
            curve.rounds.push_back(rec);
        }
        curves.push_back(std::move(curve));
    }
    std::sort(curves.begin(), curves.end(),
              [](const NamedCurve& a, const NamedCurve& b) { return a.seed < b.seed; });
    if (curves.empty()) throw ParseError("no curve_seed<N>.csv files found in '" + dir + "'");
    return curves;
}

}  // namespace palearn
