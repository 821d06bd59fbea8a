#include "palearn/pool.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "palearn/errors.hpp"

namespace palearn {

void validate_dataset(const Dataset& ds) {
    if (ds.num_classes < 2) throw InvalidInputError("dataset needs at least 2 classes");
    if (ds.feature_dim < 1) throw InvalidInputError("dataset needs feature_dim >= 1");
    std::vector<bool> class_seen(static_cast<std::size_t>(ds.num_classes), false);
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const Sample& s = ds.samples[i];
        if (s.id != static_cast<int>(i))
            throw InvalidInputError("sample ids must be 0..n-1 in order; got id " +
                                    std::to_string(s.id) + " at position " + std::to_string(i));
        if (s.features.size() != ds.feature_dim)
            throw InvalidInputError("sample " + std::to_string(s.id) + " has " +
                                    std::to_string(s.features.size()) + " features, expected " +
                                    std::to_string(ds.feature_dim));
        for (double f : s.features)
            if (!std::isfinite(f))
                throw InvalidInputError("sample " + std::to_string(s.id) + " has a non-finite feature");
        if (s.label < 0 || s.label >= ds.num_classes)
            throw InvalidInputError("sample " + std::to_string(s.id) + " has out-of-range label " +
                                    std::to_string(s.label));
        class_seen[static_cast<std::size_t>(s.label)] = true;
    }
    for (int c = 0; c < ds.num_classes; ++c)
        if (!class_seen[static_cast<std::size_t>(c)])
            throw InvalidInputError("class " + std::to_string(c) + " has no samples");
}

PoolState make_unlabeled_pool(const Dataset& ds) {
    PoolState pool;
    pool.unlabeled_ids.reserve(ds.samples.size());
    for (const Sample& s : ds.samples) pool.unlabeled_ids.push_back(s.id);
    return pool;
}

void validate_pool(const Dataset& ds, const PoolState& pool) {
    if (!std::is_sorted(pool.labeled_ids.begin(), pool.labeled_ids.end()) ||
        !std::is_sorted(pool.unlabeled_ids.begin(), pool.unlabeled_ids.end()))
        throw InvalidInputError("pool id lists must be ascending");
    std::vector<int> merged;
    merged.reserve(pool.labeled_ids.size() + pool.unlabeled_ids.size());
    std::merge(pool.labeled_ids.begin(), pool.labeled_ids.end(),
               pool.unlabeled_ids.begin(), pool.unlabeled_ids.end(), std::back_inserter(merged));
    if (merged.size() != ds.samples.size())
        throw InvalidInputError("pool does not cover the dataset");
    for (std::size_t i = 0; i < merged.size(); ++i)
        if (merged[i] != static_cast<int>(i))
            throw InvalidInputError("pool ids do not match dataset ids (overlap or gap at " +
                                    std::to_string(merged[i]) + ")");
}

PatientPartition partition_by_patient(const Dataset& ds, const PoolState& pool) {
    PatientPartition part;
    for (int id : pool.unlabeled_ids)
        part.groups[ds.samples[static_cast<std::size_t>(id)].patient_id].push_back(id);
    return part;
}

PoolState seed_initial(const PoolState& pool, std::size_t b0, Rng& rng) {
    if (b0 > pool.unlabeled_ids.size())
        throw BudgetError("initial budget " + std::to_string(b0) + " exceeds unlabeled count " +
                          std::to_string(pool.unlabeled_ids.size()));
    std::vector<int> chosen = rng.sample_without_replacement(pool.unlabeled_ids, b0);
    std::sort(chosen.begin(), chosen.end());

    PoolState next;
    std::set_union(pool.labeled_ids.begin(), pool.labeled_ids.end(), chosen.begin(), chosen.end(),
                   std::back_inserter(next.labeled_ids));
    std::set_difference(pool.unlabeled_ids.begin(), pool.unlabeled_ids.end(), chosen.begin(),
                        chosen.end(), std::back_inserter(next.unlabeled_ids));
    return next;
}

PoolState label_samples(const PoolState& pool, const std::vector<int>& ids) {
    std::vector<int> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
        if (sorted[i] == sorted[i + 1])
            throw InvalidSelectionError("duplicate selection of sample id " +
                                        std::to_string(sorted[i]));
    for (int id : sorted)
        if (!std::binary_search(pool.unlabeled_ids.begin(), pool.unlabeled_ids.end(), id))
            throw InvalidSelectionError("sample id " + std::to_string(id) + " is not unlabeled");

    PoolState next;
    std::set_union(pool.labeled_ids.begin(), pool.labeled_ids.end(), sorted.begin(), sorted.end(),
                   std::back_inserter(next.labeled_ids));
    std::set_difference(pool.unlabeled_ids.begin(), pool.unlabeled_ids.end(), sorted.begin(),
                        sorted.end(), std::back_inserter(next.unlabeled_ids));
    return next;
}

}  // namespace palearn
