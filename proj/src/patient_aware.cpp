#include "palearn/patient_aware.hpp"

#include <algorithm>
#include <string>

#include "palearn/errors.hpp"

namespace palearn {

PatientPick patient_pick_from_name(const std::string& name) {
    if (name == "informed") return PatientPick::Informed;
    if (name == "random") return PatientPick::RandomPatients;
    throw ConfigError("unknown patient_pick '" + name + "' (expected informed|random)");
}

std::string patient_pick_name(PatientPick pick) {
    return pick == PatientPick::Informed ? "informed" : "random";
}

namespace detail {

std::vector<int> select_champions(const PatientPartition& part,
                                  const std::unordered_map<int, double>& score_by_id,
                                  std::size_t take) {
    struct Champion {
        int id;
        double score;
    };
    std::vector<Champion> champions;
    champions.reserve(part.num_patients());
    for (const auto& [patient, ids] : part.groups) {
        Champion best{ids.front(), score_by_id.at(ids.front())};
        for (std::size_t i = 1; i < ids.size(); ++i) {
            const double s = score_by_id.at(ids[i]);
            if (s > best.score) best = {ids[i], s};  // ids ascend, so ties keep the lowest id
        }
        champions.push_back(best);
    }
    std::sort(champions.begin(), champions.end(), [](const Champion& a, const Champion& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    std::vector<int> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take && i < champions.size(); ++i) out.push_back(champions[i].id);
    return out;
}

}  // namespace detail

namespace {

// Patients ordered by their smallest unlabeled sample id. Using sample ids
// rather than patient ids keeps random patient draws aligned with random
// sample draws on one-sample-per-patient pools, so the wrapper reduces
// exactly to the unwrapped strategy there.
std::vector<int> patients_by_first_id(const PatientPartition& part) {
    std::vector<int> patients;
    patients.reserve(part.num_patients());
    for (const auto& [patient, ids] : part.groups) patients.push_back(patient);
    std::sort(patients.begin(), patients.end(), [&part](int a, int b) {
        return part.groups.at(a).front() < part.groups.at(b).front();
    });
    return patients;
}

std::vector<GradPoint> unlabeled_embeddings(const ModelState& model, const PoolState& pool,
                                            const Dataset& ds, std::vector<int>* patient_of) {
    std::vector<GradPoint> points;
    points.reserve(pool.unlabeled_ids.size());
    for (int id : pool.unlabeled_ids) {
        const Sample& s = ds.samples[static_cast<std::size_t>(id)];
        points.push_back({id, grad_embedding(model, s.features)});
        if (patient_of) patient_of->push_back(s.patient_id);
    }
    return points;
}

// One selection pass: take samples from `take` distinct patients.
std::vector<int> pick_one_per_patient(const PatientAwareConfig& cfg, const ModelState& model,
                                      const PoolState& pool, const Dataset& ds,
                                      const PatientPartition& part, std::size_t take, Rng& rng) {
    if (cfg.base_strategy == StrategyKind::Random) {
        const std::vector<int> patients =
            rng.sample_without_replacement(patients_by_first_id(part), take);
        std::vector<int> picks;
        picks.reserve(take);
        for (int patient : patients) {
            const std::vector<int>& ids = part.groups.at(patient);
            picks.push_back(ids[rng.uniform_index(ids.size())]);
        }
        return picks;
    }

    if (cfg.base_strategy == StrategyKind::Badge) {
        std::vector<int> patient_of;
        std::vector<GradPoint> points = unlabeled_embeddings(model, pool, ds, &patient_of);
        if (cfg.patient_pick == PatientPick::RandomPatients) {
            // restrict the D^2 draws to a uniformly chosen set of patients
            std::vector<int> chosen =
                rng.sample_without_replacement(patients_by_first_id(part), take);
            std::sort(chosen.begin(), chosen.end());
            std::vector<GradPoint> restricted;
            std::vector<int> restricted_patients;
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (std::binary_search(chosen.begin(), chosen.end(), patient_of[i])) {
                    restricted.push_back(std::move(points[i]));
                    restricted_patients.push_back(patient_of[i]);
                }
            }
            points = std::move(restricted);
            patient_of = std::move(restricted_patients);
        }
        const std::vector<std::size_t> idx =
            detail::kmeanspp_indices(points, take, rng, &patient_of);
        std::vector<int> picks;
        picks.reserve(take);
        for (std::size_t i : idx) picks.push_back(points[i].id);
        return picks;
    }

    // uncertainty bases: score everything, then champion per patient
    std::unordered_map<int, double> score_by_id;
    score_by_id.reserve(pool.unlabeled_ids.size());
    for (int id : pool.unlabeled_ids) {
        const ProbVector p = predict_proba(model, ds.samples[static_cast<std::size_t>(id)].features);
        score_by_id.emplace(id, uncertainty_score(cfg.base_strategy, p));
    }

    if (cfg.patient_pick == PatientPick::RandomPatients) {
        const std::vector<int> patients =
            rng.sample_without_replacement(patients_by_first_id(part), take);
        std::vector<int> picks;
        picks.reserve(take);
        for (int patient : patients) {
            const std::vector<int>& ids = part.groups.at(patient);
            int best = ids.front();
            for (std::size_t i = 1; i < ids.size(); ++i)
                if (score_by_id.at(ids[i]) > score_by_id.at(best)) best = ids[i];
            picks.push_back(best);
        }
        return picks;
    }
    return detail::select_champions(part, score_by_id, take);
}

}  // namespace

std::vector<int> patient_aware_select(const PatientAwareConfig& cfg, const ModelState& model,
                                      const PoolState& pool, const Dataset& ds, Rng& rng) {
    if (cfg.k < 1) throw InvalidInputError("patient-aware k must be >= 1");
    if (cfg.k > pool.unlabeled_ids.size())
        throw BudgetError("batch size " + std::to_string(cfg.k) + " exceeds unlabeled count " +
                          std::to_string(pool.unlabeled_ids.size()));

    PoolState remaining = pool;
    std::vector<int> selected;
    selected.reserve(cfg.k);
    bool first_pass = true;

    while (selected.size() < cfg.k) {
        const PatientPartition part = partition_by_patient(ds, remaining);
        const std::size_t need = cfg.k - selected.size();
        if (first_pass && part.num_patients() < need && !cfg.allow_refill)
            throw InsufficientPatientsError(
                "only " + std::to_string(part.num_patients()) + " patients available for k = " +
                std::to_string(cfg.k) + " and refill is disabled");
        const std::size_t take = std::min(need, part.num_patients());
        const std::vector<int> picks =
            pick_one_per_patient(cfg, model, remaining, ds, part, take, rng);
        selected.insert(selected.end(), picks.begin(), picks.end());
        remaining = label_samples(remaining, picks);
        first_pass = false;
    }
    return selected;
}

}  // namespace palearn
