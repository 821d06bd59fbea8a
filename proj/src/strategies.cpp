#include "palearn/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "palearn/errors.hpp"

namespace palearn {

StrategyKind strategy_from_name(const std::string& name) {
    if (name == "random") return StrategyKind::Random;
    if (name == "least_confidence") return StrategyKind::LeastConfidence;
    if (name == "margin") return StrategyKind::Margin;
    if (name == "entropy") return StrategyKind::Entropy;
    if (name == "badge") return StrategyKind::Badge;
    throw ConfigError("unknown strategy '" + name +
                      "' (expected random|least_confidence|margin|entropy|badge)");
}

std::string strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Random: return "random";
        case StrategyKind::LeastConfidence: return "least_confidence";
        case StrategyKind::Margin: return "margin";
        case StrategyKind::Entropy: return "entropy";
        case StrategyKind::Badge: return "badge";
    }
    return "unknown";
}

bool is_uncertainty_strategy(StrategyKind kind) {
    return kind == StrategyKind::LeastConfidence || kind == StrategyKind::Margin ||
           kind == StrategyKind::Entropy;
}

double score_least_confidence(const ProbVector& p) {
    return 1.0 - *std::max_element(p.begin(), p.end());
}

double score_margin(const ProbVector& p) {
    double top1 = -std::numeric_limits<double>::infinity();
    double top2 = -std::numeric_limits<double>::infinity();
    for (double v : p) {
        if (v > top1) {
            top2 = top1;
            top1 = v;
        } else if (v > top2) {
            top2 = v;
        }
    }
    return -(top1 - top2);
}

double score_entropy(const ProbVector& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

double uncertainty_score(StrategyKind kind, const ProbVector& p) {
    switch (kind) {
        case StrategyKind::LeastConfidence: return score_least_confidence(p);
        case StrategyKind::Margin: return score_margin(p);
        case StrategyKind::Entropy: return score_entropy(p);
        default: throw InvalidInputError("strategy has no pointwise score");
    }
}

std::vector<int> top_k_ids(std::vector<ScoredSample> scored, std::size_t k) {
    std::sort(scored.begin(), scored.end(), [](const ScoredSample& a, const ScoredSample& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.sample_id < b.sample_id;
    });
    std::vector<int> ids;
    ids.reserve(k);
    for (std::size_t i = 0; i < k && i < scored.size(); ++i) ids.push_back(scored[i].sample_id);
    return ids;
}

namespace detail {

namespace {

double squared_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace

std::vector<std::size_t> kmeanspp_indices(const std::vector<GradPoint>& points, std::size_t k,
                                          Rng& rng, const std::vector<int>* group_of) {
    const std::size_t n = points.size();
    if (k > n) throw BudgetError("k-means++ asked for " + std::to_string(k) + " centers from " +
                                 std::to_string(n) + " points");

    std::vector<bool> masked(n, false);
    std::vector<double> best_d2(n, std::numeric_limits<double>::infinity());
    std::vector<double> weights(n, 0.0);
    std::vector<std::size_t> picked;
    picked.reserve(k);

    for (std::size_t step = 0; step < k; ++step) {
        for (std::size_t i = 0; i < n; ++i) {
            if (masked[i])
                weights[i] = 0.0;
            else
                weights[i] = step == 0 ? squared_norm(points[i].embedding) : best_d2[i];
        }

        std::size_t idx = rng.discrete(weights);
        if (idx == n) {
            // all remaining weights are zero: uniform among unmasked points
            std::size_t unmasked = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (!masked[i]) ++unmasked;
            if (unmasked == 0)
                throw BudgetError("k-means++ ran out of unmasked candidates after " +
                                  std::to_string(picked.size()) + " picks");
            std::size_t target = rng.uniform_index(unmasked);
            for (std::size_t i = 0; i < n; ++i) {
                if (masked[i]) continue;
                if (target == 0) {
                    idx = i;
                    break;
                }
                --target;
            }
        }

        picked.push_back(idx);
        if (group_of) {
            const int group = (*group_of)[idx];
            for (std::size_t i = 0; i < n; ++i)
                if ((*group_of)[i] == group) masked[i] = true;
        } else {
            masked[idx] = true;
        }
        for (std::size_t i = 0; i < n; ++i)
            best_d2[i] = std::min(best_d2[i],
                                  squared_distance(points[i].embedding, points[idx].embedding));
    }
    return picked;
}

}  // namespace detail

std::vector<int> kmeanspp_select(const std::vector<GradPoint>& points, std::size_t k, Rng& rng) {
    const std::vector<std::size_t> idx = detail::kmeanspp_indices(points, k, rng, nullptr);
    std::vector<int> ids;
    ids.reserve(idx.size());
    for (std::size_t i : idx) ids.push_back(points[i].id);
    return ids;
}

std::vector<int> select_batch(StrategyKind kind, const ModelState& model, const PoolState& pool,
                              const Dataset& ds, std::size_t k, Rng& rng) {
    if (k > pool.unlabeled_ids.size())
        throw BudgetError("batch size " + std::to_string(k) + " exceeds unlabeled count " +
                          std::to_string(pool.unlabeled_ids.size()));

    switch (kind) {
        case StrategyKind::Random:
            return rng.sample_without_replacement(pool.unlabeled_ids, k);
        case StrategyKind::Badge: {
            std::vector<GradPoint> points;
            points.reserve(pool.unlabeled_ids.size());
            for (int id : pool.unlabeled_ids)
                points.push_back(
                    {id, grad_embedding(model, ds.samples[static_cast<std::size_t>(id)].features)});
            return kmeanspp_select(points, k, rng);
        }
        default: {
            std::vector<ScoredSample> scored;
            scored.reserve(pool.unlabeled_ids.size());
            for (int id : pool.unlabeled_ids) {
                const ProbVector p =
                    predict_proba(model, ds.samples[static_cast<std::size_t>(id)].features);
                scored.push_back({id, uncertainty_score(kind, p)});
            }
            return top_k_ids(std::move(scored), k);
        }
    }
}

}  // namespace palearn
