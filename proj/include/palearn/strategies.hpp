#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "palearn/model.hpp"
#include "palearn/pool.hpp"
#include "palearn/rng.hpp"

namespace palearn {

enum class StrategyKind { Random, LeastConfidence, Margin, Entropy, Badge };

// Names accepted in configs and on the CLI:
// random | least_confidence | margin | entropy | badge
StrategyKind strategy_from_name(const std::string& name);
std::string strategy_name(StrategyKind kind);

// True for the pointwise uncertainty scorers (least confidence, margin,
// entropy); false for Random and Badge.
bool is_uncertainty_strategy(StrategyKind kind);

struct ScoredSample {
    int sample_id = 0;
    double score = 0.0;  // higher = more informative, for every strategy
};

// 1 - max_c p_c.
double score_least_confidence(const ProbVector& p);

// -(p_(1) - p_(2)), the negated gap between the two largest probabilities.
double score_margin(const ProbVector& p);

// Shannon entropy -sum p ln p, with 0 ln 0 = 0.
double score_entropy(const ProbVector& p);

double uncertainty_score(StrategyKind kind, const ProbVector& p);

// The k highest-scoring ids, ties broken by lowest id; returned best-first.
std::vector<int> top_k_ids(std::vector<ScoredSample> scored, std::size_t k);

struct GradPoint {
    int id = 0;
    std::vector<double> embedding;
};

// k-means++ seeding over gradient embeddings: the first center is drawn with
// probability proportional to squared embedding norm, later centers
// proportional to squared distance to the nearest chosen center. Returns ids
// in pick order; throws BudgetError when k exceeds the point count.
std::vector<int> kmeanspp_select(const std::vector<GradPoint>& points, std::size_t k, Rng& rng);

// Selects k unlabeled ids with the given strategy. Random ignores the model;
// the uncertainty strategies ignore the rng; Badge runs kmeanspp_select over
// the unlabeled gradient embeddings.
std::vector<int> select_batch(StrategyKind kind, const ModelState& model, const PoolState& pool,
                              const Dataset& ds, std::size_t k, Rng& rng);

namespace detail {

// Core D^2 sampler shared with the patient-aware wrapper. group_of, when
// non-null, maps point index -> group key and picking a point masks its whole
// group from later draws; when null only the picked point is masked. When all
// candidate weights are zero the draw falls back to uniform among the
// unmasked points. Returns indices into points, in pick order.
std::vector<std::size_t> kmeanspp_indices(const std::vector<GradPoint>& points, std::size_t k,
                                          Rng& rng, const std::vector<int>* group_of);

}  // namespace detail

}  // namespace palearn
