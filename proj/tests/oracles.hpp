#pragma once

// Independent oracles used by the unit and acceptance suites. Everything here
// recomputes expected values from first principles and must stay decoupled
// from the library's implementation paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "palearn/model.hpp"
#include "palearn/pool.hpp"
#include "palearn/rng.hpp"
#include "palearn/strategies.hpp"

namespace oracle {

// Naive softmax in extended precision, no max-subtraction trick.
inline std::vector<double> softmax(const std::vector<double>& logits) {
    std::vector<long double> e(logits.size());
    long double total = 0.0L;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        e[i] = std::exp(static_cast<long double>(logits[i]));
        total += e[i];
    }
    std::vector<double> p(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i)
        p[i] = static_cast<double>(e[i] / total);
    return p;
}

// Brute-force top-k: sort every (score, id) pair, ties to the lowest id.
inline std::vector<int> top_k(std::vector<std::pair<double, int>> scored, std::size_t k) {
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<int> ids;
    for (std::size_t i = 0; i < k && i < scored.size(); ++i) ids.push_back(scored[i].second);
    return ids;
}

inline double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// Standard error of the mean: sample std (Bessel) / sqrt(n); 0 for n = 1.
inline double std_error(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double n = static_cast<double>(xs.size());
    return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

inline double norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    const double denom = std::max(norm(a), norm(b));
    if (denom == 0.0) return norm(diff);
    return norm(diff) / denom;
}

// Flattened analytic gradient of the full mean cross-entropy loss.
inline std::vector<double> flatten_gradient(const std::vector<palearn::LayerGrad>& grads) {
    std::vector<double> flat;
    for (const auto& g : grads) {
        flat.insert(flat.end(), g.w.data.begin(), g.w.data.end());
        flat.insert(flat.end(), g.b.begin(), g.b.end());
    }
    return flat;
}

// Central finite differences of the full loss over every parameter.
inline std::vector<double> finite_diff_loss_grad(const palearn::ModelState& model,
                                                 const std::vector<palearn::Sample>& batch,
                                                 double step) {
    std::vector<double> grad;
    palearn::ModelState work = model;
    auto probe = [&](double& param) {
        const double saved = param;
        param = saved + step;
        const double up = palearn::mean_cross_entropy(work, batch);
        param = saved - step;
        const double down = palearn::mean_cross_entropy(work, batch);
        param = saved;
        grad.push_back((up - down) / (2.0 * step));
    };
    for (auto& layer : work.layers) {
        for (double& w : layer.w.data) probe(w);
        for (double& b : layer.b) probe(b);
    }
    return grad;
}

// Central finite differences of the pseudo-label cross-entropy w.r.t. the
// output-layer weights, laid out class-major to match GradEmbedding.
inline std::vector<double> finite_diff_embedding(const palearn::ModelState& model,
                                                 const std::vector<double>& features,
                                                 double step) {
    const int pseudo = palearn::predict_class(model, features);
    palearn::Sample s;
    s.id = 0;
    s.patient_id = 0;
    s.features = features;
    s.label = pseudo;
    const std::vector<palearn::Sample> batch{s};

    palearn::ModelState work = model;
    palearn::Layer& out = work.layers.back();
    std::vector<double> grad;
    grad.reserve(out.w.data.size());
    for (double& w : out.w.data) {
        const double saved = w;
        w = saved + step;
        const double up = palearn::mean_cross_entropy(work, batch);
        w = saved - step;
        const double down = palearn::mean_cross_entropy(work, batch);
        w = saved;
        grad.push_back((up - down) / (2.0 * step));
    }
    return grad;
}

// Random point on the probability simplex.
inline std::vector<double> random_simplex(std::size_t c, palearn::Rng& rng) {
    std::vector<double> p(c);
    double total = 0.0;
    for (double& v : p) {
        v = -std::log(1.0 - rng.uniform_real());
        total += v;
    }
    for (double& v : p) v /= total;
    return p;
}

// Small random dataset; labels cycle so every class appears, patients are
// assigned uniformly at random.
inline palearn::Dataset random_dataset(std::size_t n, std::size_t dim, int classes, int patients,
                                       palearn::Rng& rng) {
    palearn::Dataset ds;
    ds.num_classes = classes;
    ds.feature_dim = dim;
    for (std::size_t i = 0; i < n; ++i) {
        palearn::Sample s;
        s.id = static_cast<int>(i);
        s.patient_id = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(patients)));
        s.label = static_cast<int>(i) % classes;
        s.features.resize(dim);
        for (double& f : s.features) f = rng.normal();
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

// Random model with weights spread wider than the init draw.
inline palearn::ModelState random_model(std::size_t dim, int classes, std::size_t hidden,
                                        palearn::Rng& rng) {
    palearn::ModelConfig cfg;
    cfg.hidden_units = hidden;
    palearn::ModelState m =
        palearn::init_model(cfg, dim, static_cast<std::size_t>(classes), rng);
    for (auto& layer : m.layers) {
        for (double& w : layer.w.data) w += 0.5 * rng.normal();
        for (double& b : layer.b) b += 0.25 * rng.normal();
    }
    return m;
}

}  // namespace oracle
