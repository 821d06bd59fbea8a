#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "palearn/pool.hpp"
#include "palearn/rng.hpp"

namespace palearn {

struct ModelConfig {
    std::size_t hidden_units = 0;  // 0 = plain softmax regression
    double learning_rate = 1.5e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t batch_size = 32;
    double target_train_accuracy = 0.98;
    std::size_t max_epochs = 500;
};

void validate_model_config(const ModelConfig& cfg);

// Row-major dense matrix; nothing fancier is needed at this model size.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct Layer {
    Matrix w;               // out x in
    std::vector<double> b;  // out
};

struct AdamMoments {
    Matrix m_w, v_w;
    std::vector<double> m_b, v_b;
};

// Value-semantic classifier state: an optional ReLU hidden layer followed by
// a softmax output layer, plus Adam moment buffers shaped like the weights.
struct ModelState {
    std::vector<Layer> layers;         // [hidden,] output
    std::vector<AdamMoments> moments;  // shape-matched to layers
    std::int64_t step_count = 0;
    std::size_t feature_dim = 0;
    std::size_t num_classes = 0;
    std::size_t hidden_units = 0;

    std::size_t penultimate_width() const { return hidden_units ? hidden_units : feature_dim; }
    std::size_t parameter_count() const;
};

using ProbVector = std::vector<double>;

// vec((p - e_yhat) (x) h): the cross-entropy gradient w.r.t. the output-layer
// weights at the predicted pseudo-label, laid out class-major (C x H).
using GradEmbedding = std::vector<double>;

struct TrainReport {
    std::size_t epochs_run = 0;
    double final_train_accuracy = 0.0;
    bool threshold_reached = false;
};

// Weights uniform on [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases and moments
// zero. Deterministic per rng seed.
ModelState init_model(const ModelConfig& cfg, std::size_t feature_dim, std::size_t num_classes,
                      Rng& rng);

// Softmax of the logits, computed with max-subtraction.
ProbVector predict_proba(const ModelState& model, const std::vector<double>& features);

// Argmax of predict_proba, lowest class index on ties.
int predict_class(const ModelState& model, const std::vector<double>& features);

GradEmbedding grad_embedding(const ModelState& model, const std::vector<double>& features);

// Fraction of samples whose predicted class equals the label.
double evaluate_accuracy(const ModelState& model, const std::vector<Sample>& samples);

// Runs shuffled mini-batch Adam epochs on mean cross-entropy until the first
// epoch whose post-epoch training accuracy reaches the target (at least one
// epoch always runs), or until max_epochs. Throws TrainError on an empty
// labeled set or a non-finite batch loss.
std::pair<ModelState, TrainReport> train_to_threshold(ModelState model,
                                                      const std::vector<Sample>& labeled,
                                                      const ModelConfig& cfg, Rng& rng);

// Loss/gradient probes, exposed for the optimizer and for finite-difference
// verification.
double mean_cross_entropy(const ModelState& model, const std::vector<Sample>& batch);

struct LayerGrad {
    Matrix w;
    std::vector<double> b;
};

std::vector<LayerGrad> loss_gradient(const ModelState& model, const std::vector<Sample>& batch);

}  // namespace palearn
