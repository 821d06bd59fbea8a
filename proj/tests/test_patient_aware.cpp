#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "palearn/errors.hpp"
#include "palearn/patient_aware.hpp"

using namespace palearn;

namespace {

Dataset dataset_with_patients(const std::vector<int>& patient_ids, std::size_t dim = 3,
                              int classes = 2, std::uint64_t seed = 5) {
    Rng rng(seed);
    Dataset ds;
    ds.num_classes = classes;
    ds.feature_dim = dim;
    for (std::size_t i = 0; i < patient_ids.size(); ++i) {
        Sample s;
        s.id = static_cast<int>(i);
        s.patient_id = patient_ids[i];
        s.label = static_cast<int>(i) % classes;
        s.features.resize(dim);
        for (double& f : s.features) f = rng.normal();
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

std::map<int, std::set<int>> patients_of(const Dataset& ds, const std::vector<int>& ids) {
    std::map<int, std::set<int>> by_patient;
    for (int id : ids) by_patient[ds.samples[static_cast<std::size_t>(id)].patient_id].insert(id);
    return by_patient;
}

}  // namespace

TEST_CASE("champion rule picks the best sample of the best patients") {
    // patients A{s0, s1}, B{s2}, C{s3} with scores 0.9, 1.0, 0.2, 0.5:
    // champions are s1 (1.0), s3 (0.5), s2 (0.2); K = 2 selects {s1, s3}
    PatientPartition part;
    part.groups[1] = {0, 1};
    part.groups[2] = {2};
    part.groups[3] = {3};
    const std::unordered_map<int, double> scores{{0, 0.9}, {1, 1.0}, {2, 0.2}, {3, 0.5}};

    const std::vector<int> picked = detail::select_champions(part, scores, 2);
    CHECK(picked == std::vector<int>{1, 3});

    // exhaustive enumeration of the rule over every K
    CHECK(detail::select_champions(part, scores, 1) == std::vector<int>{1});
    CHECK(detail::select_champions(part, scores, 3) == std::vector<int>{1, 3, 2});
}

TEST_CASE("champion ties break to the lowest sample id") {
    PatientPartition part;
    part.groups[10] = {4, 6};
    part.groups[20] = {5};
    const std::unordered_map<int, double> scores{{4, 0.5}, {6, 0.5}, {5, 0.5}};
    // within patient 10 the tie keeps id 4; across patients the tie ranks 4 before 5
    CHECK(detail::select_champions(part, scores, 2) == std::vector<int>{4, 5});
}

TEST_CASE("selected batch spans k distinct patients when enough exist") {
    Rng rng(101);
    for (StrategyKind base : {StrategyKind::Random, StrategyKind::LeastConfidence,
                              StrategyKind::Margin, StrategyKind::Entropy, StrategyKind::Badge}) {
        const Dataset ds = oracle::random_dataset(60, 3, 3, 12, rng);
        const PoolState pool = make_unlabeled_pool(ds);
        const ModelState model = oracle::random_model(3, 3, 4, rng);

        PatientAwareConfig cfg;
        cfg.base_strategy = base;
        cfg.k = 8;
        Rng sel(7);
        const std::vector<int> ids = patient_aware_select(cfg, model, pool, ds, sel);
        REQUIRE(ids.size() == 8);
        CHECK(std::set<int>(ids.begin(), ids.end()).size() == 8);
        const std::size_t available = partition_by_patient(ds, pool).num_patients();
        if (available >= 8) CHECK(patients_of(ds, ids).size() == 8);
        for (int id : ids)
            CHECK(std::binary_search(pool.unlabeled_ids.begin(), pool.unlabeled_ids.end(), id));
    }
}

TEST_CASE("one-sample-per-patient pools reduce to the unwrapped strategy") {
    // patient ids deliberately scrambled relative to sample ids
    std::vector<int> patients;
    for (int i = 0; i < 24; ++i) patients.push_back(1000 - 7 * i);
    const Dataset ds = dataset_with_patients(patients, 4, 3, 9);
    const PoolState pool = make_unlabeled_pool(ds);
    Rng model_rng(13);
    const ModelState model = oracle::random_model(4, 3, 5, model_rng);

    for (StrategyKind base : {StrategyKind::Random, StrategyKind::LeastConfidence,
                              StrategyKind::Margin, StrategyKind::Entropy, StrategyKind::Badge}) {
        CAPTURE(strategy_name(base));
        PatientAwareConfig cfg;
        cfg.base_strategy = base;
        cfg.k = 9;
        Rng wrapped_rng(77), plain_rng(77);
        const std::vector<int> wrapped = patient_aware_select(cfg, model, pool, ds, wrapped_rng);
        const std::vector<int> plain = select_batch(base, model, pool, ds, 9, plain_rng);
        CHECK(wrapped == plain);
    }
}

TEST_CASE("refill lets patients contribute extra samples") {
    // 2 patients, k = 3: one patient must appear twice
    const Dataset ds = dataset_with_patients({50, 50, 50, 60, 60});
    const PoolState pool = make_unlabeled_pool(ds);
    Rng model_rng(3);
    const ModelState model = oracle::random_model(3, 2, 0, model_rng);

    PatientAwareConfig cfg;
    cfg.base_strategy = StrategyKind::Entropy;
    cfg.k = 3;

    SUBCASE("allow_refill = true fills the shortfall") {
        Rng sel(5);
        const std::vector<int> ids = patient_aware_select(cfg, model, pool, ds, sel);
        REQUIRE(ids.size() == 3);
        CHECK(std::set<int>(ids.begin(), ids.end()).size() == 3);
        const auto by_patient = patients_of(ds, ids);
        CHECK(by_patient.size() == 2);
        std::vector<std::size_t> counts;
        for (const auto& [patient, members] : by_patient) counts.push_back(members.size());
        std::sort(counts.begin(), counts.end());
        CHECK(counts == std::vector<std::size_t>{1, 2});
    }

    SUBCASE("allow_refill = false raises insufficient-patients") {
        cfg.allow_refill = false;
        Rng sel(5);
        CHECK_THROWS_AS(patient_aware_select(cfg, model, pool, ds, sel),
                        InsufficientPatientsError);
    }

    SUBCASE("k above the unlabeled count is a budget error") {
        cfg.k = 6;
        Rng sel(5);
        CHECK_THROWS_AS(patient_aware_select(cfg, model, pool, ds, sel), BudgetError);
    }
}

TEST_CASE("champions dominate their patient group") {
    Rng rng(201);
    for (int trial = 0; trial < 20; ++trial) {
        const Dataset ds = oracle::random_dataset(40, 3, 3, 7, rng);
        const PoolState pool = make_unlabeled_pool(ds);
        const ModelState model = oracle::random_model(3, 3, trial % 2 ? 4 : 0, rng);

        PatientAwareConfig cfg;
        cfg.base_strategy = StrategyKind::Entropy;
        cfg.k = std::min<std::size_t>(5, partition_by_patient(ds, pool).num_patients());
        Rng sel(11);
        const std::vector<int> ids = patient_aware_select(cfg, model, pool, ds, sel);

        const PatientPartition part = partition_by_patient(ds, pool);
        for (int id : ids) {
            const int patient = ds.samples[static_cast<std::size_t>(id)].patient_id;
            const double own =
                score_entropy(predict_proba(model, ds.samples[static_cast<std::size_t>(id)].features));
            for (int other : part.groups.at(patient)) {
                const double s = score_entropy(
                    predict_proba(model, ds.samples[static_cast<std::size_t>(other)].features));
                CHECK(own >= s - 1e-15);
            }
        }
    }
}

TEST_CASE("tied scores fall back to lowest ids deterministically") {
    // zero-weight model: every score ties, so champions are each patient's
    // lowest id and patients rank by champion id
    const Dataset ds = dataset_with_patients({9, 9, 5, 5, 2});
    const PoolState pool = make_unlabeled_pool(ds);
    ModelConfig mc;
    Rng rng(1);
    ModelState model = init_model(mc, 3, 2, rng);
    for (double& w : model.layers[0].w.data) w = 0.0;

    PatientAwareConfig cfg;
    cfg.base_strategy = StrategyKind::Entropy;
    cfg.k = 2;
    Rng sel(4);
    CHECK(patient_aware_select(cfg, model, pool, ds, sel) == std::vector<int>{0, 2});
}

TEST_CASE("random patient pick still selects each patient's champion") {
    Rng rng(301);
    const Dataset ds = oracle::random_dataset(50, 3, 3, 10, rng);
    const PoolState pool = make_unlabeled_pool(ds);
    const ModelState model = oracle::random_model(3, 3, 0, rng);

    PatientAwareConfig cfg;
    cfg.base_strategy = StrategyKind::LeastConfidence;
    cfg.patient_pick = PatientPick::RandomPatients;
    cfg.k = 6;
    Rng sel(21);
    const std::vector<int> ids = patient_aware_select(cfg, model, pool, ds, sel);
    REQUIRE(ids.size() == 6);
    CHECK(patients_of(ds, ids).size() == 6);

    const PatientPartition part = partition_by_patient(ds, pool);
    for (int id : ids) {
        const int patient = ds.samples[static_cast<std::size_t>(id)].patient_id;
        const double own = score_least_confidence(
            predict_proba(model, ds.samples[static_cast<std::size_t>(id)].features));
        for (int other : part.groups.at(patient)) {
            const double s = score_least_confidence(
                predict_proba(model, ds.samples[static_cast<std::size_t>(other)].features));
            CHECK(own >= s - 1e-15);
        }
    }

    // different seeds can choose different patients
    Rng sel2(22);
    const std::vector<int> other = patient_aware_select(cfg, model, pool, ds, sel2);
    CHECK(ids != other);
}

TEST_CASE("badge with random patient pick keeps one sample per chosen patient") {
    Rng rng(401);
    const Dataset ds = oracle::random_dataset(40, 3, 3, 8, rng);
    const PoolState pool = make_unlabeled_pool(ds);
    const ModelState model = oracle::random_model(3, 3, 4, rng);

    PatientAwareConfig cfg;
    cfg.base_strategy = StrategyKind::Badge;
    cfg.patient_pick = PatientPick::RandomPatients;
    cfg.k = 5;
    Rng sel(31);
    const std::vector<int> ids = patient_aware_select(cfg, model, pool, ds, sel);
    REQUIRE(ids.size() == 5);
    CHECK(patients_of(ds, ids).size() == 5);
}

TEST_CASE("fixed seed reproduces the selection in every mode") {
    Rng rng(501);
    const Dataset ds = oracle::random_dataset(45, 3, 3, 9, rng);
    const PoolState pool = make_unlabeled_pool(ds);
    const ModelState model = oracle::random_model(3, 3, 4, rng);

    for (StrategyKind base : {StrategyKind::Random, StrategyKind::Entropy, StrategyKind::Badge}) {
        for (PatientPick pick : {PatientPick::Informed, PatientPick::RandomPatients}) {
            PatientAwareConfig cfg;
            cfg.base_strategy = base;
            cfg.patient_pick = pick;
            cfg.k = 6;
            Rng a(8), b(8);
            CHECK(patient_aware_select(cfg, model, pool, ds, a) ==
                  patient_aware_select(cfg, model, pool, ds, b));
        }
    }
}

TEST_CASE("patient pick names round-trip") {
    CHECK(patient_pick_from_name("informed") == PatientPick::Informed);
    CHECK(patient_pick_from_name("random") == PatientPick::RandomPatients);
    CHECK_THROWS_AS(patient_pick_from_name("weighted"), ConfigError);
}
