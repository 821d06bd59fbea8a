#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "palearn/strategies.hpp"

namespace palearn {

// How the K patients of a round are chosen when the base strategy provides
// scores: by their champions' informativeness, or uniformly at random.
enum class PatientPick { Informed, RandomPatients };

PatientPick patient_pick_from_name(const std::string& name);  // informed | random
std::string patient_pick_name(PatientPick pick);

struct PatientAwareConfig {
    StrategyKind base_strategy = StrategyKind::Random;
    std::size_t k = 1;  // samples per round, one per distinct patient
    bool allow_refill = true;
    PatientPick patient_pick = PatientPick::Informed;
};

// Wraps the base strategy so each round selects k samples from k distinct
// patients (one per patient). When fewer patients than k remain and refill is
// allowed, the procedure repeats over the not-yet-selected remainder, letting
// patients contribute extra samples; otherwise InsufficientPatientsError.
// Throws BudgetError when the unlabeled pool holds fewer than k samples.
std::vector<int> patient_aware_select(const PatientAwareConfig& cfg, const ModelState& model,
                                      const PoolState& pool, const Dataset& ds, Rng& rng);

namespace detail {

// Champion rule: per patient keep its highest-scoring sample (ties to the
// lowest id), rank patients by champion score (ties to the lowest champion
// id), return the top `take` champions' ids in rank order.
std::vector<int> select_champions(const PatientPartition& part,
                                  const std::unordered_map<int, double>& score_by_id,
                                  std::size_t take);

}  // namespace detail

}  // namespace palearn
