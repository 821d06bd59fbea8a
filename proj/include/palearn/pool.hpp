#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "palearn/rng.hpp"

namespace palearn {

// One feature vector with its class label and patient identity.
struct Sample {
    int id = 0;
    int patient_id = 0;
    std::vector<double> features;
    int label = 0;
};

struct Dataset {
    std::vector<Sample> samples;
    int num_classes = 0;
    std::size_t feature_dim = 0;

    std::size_t size() const { return samples.size(); }
};

// Throws InvalidInputError unless ids are dense 0..n-1 in order, features are
// finite with matching dimension, labels lie in [0, num_classes) and every
// class appears at least once.
void validate_dataset(const Dataset& ds);

// Labeled/unlabeled split of a dataset's ids. Both lists are kept in
// ascending order so downstream tie-breaking is deterministic. Values are
// immutable snapshots: operations return new states.
struct PoolState {
    std::vector<int> labeled_ids;
    std::vector<int> unlabeled_ids;
};

PoolState make_unlabeled_pool(const Dataset& ds);

// Throws InvalidInputError if the pool is not a disjoint cover of the
// dataset's ids.
void validate_pool(const Dataset& ds, const PoolState& pool);

// Unlabeled ids grouped by patient identity. Patients with no unlabeled
// samples are not stored; group vectors are ascending.
struct PatientPartition {
    std::map<int, std::vector<int>> groups;

    std::size_t num_patients() const { return groups.size(); }
    bool empty() const { return groups.empty(); }
};

PatientPartition partition_by_patient(const Dataset& ds, const PoolState& pool);

// Moves exactly b0 ids, drawn uniformly without replacement, from the
// unlabeled to the labeled set. Throws BudgetError when b0 exceeds the
// unlabeled count.
PoolState seed_initial(const PoolState& pool, std::size_t b0, Rng& rng);

// Moves the given ids (all currently unlabeled, pairwise distinct) to the
// labeled set. Throws InvalidSelectionError naming the offending id.
PoolState label_samples(const PoolState& pool, const std::vector<int>& ids);

}  // namespace palearn
