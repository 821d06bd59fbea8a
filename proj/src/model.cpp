#include "palearn/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "palearn/errors.hpp"

namespace palearn {

namespace {

struct ForwardPass {
    std::vector<double> preact;  // hidden pre-activation (empty without hidden layer)
    std::vector<double> hidden;  // penultimate activation (the input itself without hidden layer)
    std::vector<double> logits;
};

void check_features(const ModelState& model, const std::vector<double>& features) {
    if (features.size() != model.feature_dim)
        throw InvalidInputError("feature vector has length " + std::to_string(features.size()) +
                                ", model expects " + std::to_string(model.feature_dim));
    for (double f : features)
        if (!std::isfinite(f)) throw InvalidInputError("non-finite feature value");
}

std::vector<double> affine(const Layer& layer, const std::vector<double>& x) {
    std::vector<double> out(layer.b);
    for (std::size_t r = 0; r < layer.w.rows; ++r) {
        double acc = 0.0;
        const double* row = &layer.w.data[r * layer.w.cols];
        for (std::size_t c = 0; c < layer.w.cols; ++c) acc += row[c] * x[c];
        out[r] += acc;
    }
    return out;
}

ForwardPass forward(const ModelState& model, const std::vector<double>& features) {
    ForwardPass fp;
    if (model.hidden_units) {
        fp.preact = affine(model.layers[0], features);
        fp.hidden = fp.preact;
        for (double& h : fp.hidden) h = h > 0.0 ? h : 0.0;
        fp.logits = affine(model.layers[1], fp.hidden);
    } else {
        fp.hidden = features;
        fp.logits = affine(model.layers[0], features);
    }
    return fp;
}

ProbVector softmax(const std::vector<double>& logits) {
    const double zmax = *std::max_element(logits.begin(), logits.end());
    ProbVector p(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - zmax);
        total += p[i];
    }
    for (double& v : p) v /= total;
    return p;
}

int argmax_lowest(const std::vector<double>& v) {
    int best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    return best;
}

// log(sum exp(z)) - z[y], numerically stable.
double cross_entropy_from_logits(const std::vector<double>& logits, int label) {
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double z : logits) total += std::exp(z - zmax);
    return std::log(total) + zmax - logits[static_cast<std::size_t>(label)];
}

std::vector<LayerGrad> zero_grads(const ModelState& model) {
    std::vector<LayerGrad> grads;
    grads.reserve(model.layers.size());
    for (const Layer& layer : model.layers) {
        LayerGrad g;
        g.w = Matrix(layer.w.rows, layer.w.cols);
        g.b.assign(layer.b.size(), 0.0);
        grads.push_back(std::move(g));
    }
    return grads;
}

void adam_update(std::vector<double>& w, std::vector<double>& m, std::vector<double>& v,
                 const std::vector<double>& g, const ModelConfig& cfg, double bias1, double bias2) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * g[i];
        v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * g[i] * g[i];
        const double mhat = m[i] / bias1;
        const double vhat = v[i] / bias2;
        w[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    }
}

double train_accuracy(const ModelState& model, const std::vector<Sample>& samples) {
    std::size_t correct = 0;
    for (const Sample& s : samples)
        if (predict_class(model, s.features) == s.label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace

void validate_model_config(const ModelConfig& cfg) {
    if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (!(cfg.target_train_accuracy > 0.0 && cfg.target_train_accuracy <= 1.0))
        throw ConfigError("target_train_accuracy must be in (0, 1]");
    if (cfg.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(cfg.adam_beta1 >= 0.0 && cfg.adam_beta1 < 1.0) ||
        !(cfg.adam_beta2 >= 0.0 && cfg.adam_beta2 < 1.0))
        throw ConfigError("adam betas must be in [0, 1)");
    if (!(cfg.adam_eps > 0.0)) throw ConfigError("adam_eps must be > 0");
}

std::size_t ModelState::parameter_count() const {
    std::size_t n = 0;
    for (const Layer& layer : layers) n += layer.w.data.size() + layer.b.size();
    return n;
}

ModelState init_model(const ModelConfig& cfg, std::size_t feature_dim, std::size_t num_classes,
                      Rng& rng) {
    if (feature_dim < 1) throw InvalidInputError("feature_dim must be >= 1");
    if (num_classes < 2) throw InvalidInputError("num_classes must be >= 2");
    validate_model_config(cfg);

    ModelState model;
    model.feature_dim = feature_dim;
    model.num_classes = num_classes;
    model.hidden_units = cfg.hidden_units;

    auto make_layer = [&rng](std::size_t out, std::size_t in) {
        Layer layer;
        layer.w = Matrix(out, in);
        layer.b.assign(out, 0.0);
        const double scale = 1.0 / std::sqrt(static_cast<double>(in));
        for (double& w : layer.w.data) w = rng.uniform_symmetric(scale);
        return layer;
    };

    if (cfg.hidden_units) {
        model.layers.push_back(make_layer(cfg.hidden_units, feature_dim));
        model.layers.push_back(make_layer(num_classes, cfg.hidden_units));
    } else {
        model.layers.push_back(make_layer(num_classes, feature_dim));
    }

    for (const Layer& layer : model.layers) {
        AdamMoments m;
        m.m_w = Matrix(layer.w.rows, layer.w.cols);
        m.v_w = Matrix(layer.w.rows, layer.w.cols);
        m.m_b.assign(layer.b.size(), 0.0);
        m.v_b.assign(layer.b.size(), 0.0);
        model.moments.push_back(std::move(m));
    }
    return model;
}

ProbVector predict_proba(const ModelState& model, const std::vector<double>& features) {
    check_features(model, features);
    return softmax(forward(model, features).logits);
}

int predict_class(const ModelState& model, const std::vector<double>& features) {
    check_features(model, features);
    return argmax_lowest(forward(model, features).logits);
}

GradEmbedding grad_embedding(const ModelState& model, const std::vector<double>& features) {
    check_features(model, features);
    const ForwardPass fp = forward(model, features);
    const ProbVector p = softmax(fp.logits);
    const int yhat = argmax_lowest(p);

    const std::size_t width = model.penultimate_width();
    GradEmbedding g(model.num_classes * width);
    for (std::size_t c = 0; c < model.num_classes; ++c) {
        const double delta = p[c] - (static_cast<int>(c) == yhat ? 1.0 : 0.0);
        for (std::size_t j = 0; j < width; ++j) g[c * width + j] = delta * fp.hidden[j];
    }
    return g;
}

double evaluate_accuracy(const ModelState& model, const std::vector<Sample>& samples) {
    if (samples.empty()) throw InvalidInputError("cannot evaluate accuracy on an empty set");
    return train_accuracy(model, samples);
}

double mean_cross_entropy(const ModelState& model, const std::vector<Sample>& batch) {
    if (batch.empty()) throw InvalidInputError("cannot compute loss on an empty batch");
    double total = 0.0;
    for (const Sample& s : batch)
        total += cross_entropy_from_logits(forward(model, s.features).logits, s.label);
    return total / static_cast<double>(batch.size());
}

std::vector<LayerGrad> loss_gradient(const ModelState& model, const std::vector<Sample>& batch) {
    if (batch.empty()) throw InvalidInputError("cannot compute gradient on an empty batch");
    std::vector<LayerGrad> grads = zero_grads(model);
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    const std::size_t out_idx = model.layers.size() - 1;

    for (const Sample& s : batch) {
        const ForwardPass fp = forward(model, s.features);
        ProbVector dlogit = softmax(fp.logits);
        dlogit[static_cast<std::size_t>(s.label)] -= 1.0;
        for (double& d : dlogit) d *= inv_n;

        const Layer& out = model.layers[out_idx];
        LayerGrad& gout = grads[out_idx];
        for (std::size_t r = 0; r < out.w.rows; ++r) {
            for (std::size_t c = 0; c < out.w.cols; ++c)
                gout.w.at(r, c) += dlogit[r] * fp.hidden[c];
            gout.b[r] += dlogit[r];
        }

        if (model.hidden_units) {
            const Layer& hid = model.layers[0];
            LayerGrad& ghid = grads[0];
            for (std::size_t j = 0; j < model.hidden_units; ++j) {
                if (fp.preact[j] <= 0.0) continue;  // ReLU gate
                double dh = 0.0;
                for (std::size_t r = 0; r < out.w.rows; ++r) dh += out.w.at(r, j) * dlogit[r];
                for (std::size_t c = 0; c < hid.w.cols; ++c)
                    ghid.w.at(j, c) += dh * s.features[c];
                ghid.b[j] += dh;
            }
        }
    }
    return grads;
}

std::pair<ModelState, TrainReport> train_to_threshold(ModelState model,
                                                      const std::vector<Sample>& labeled,
                                                      const ModelConfig& cfg, Rng& rng) {
    validate_model_config(cfg);
    if (labeled.empty()) throw TrainError("cannot train on an empty labeled set");

    std::vector<std::size_t> order(labeled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainReport report;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            std::vector<Sample> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i)
                batch.push_back(labeled[order[i]]);

            const double loss = mean_cross_entropy(model, batch);
            if (!std::isfinite(loss)) throw TrainError("non-finite training loss");

            const std::vector<LayerGrad> grads = loss_gradient(model, batch);
            ++model.step_count;
            const double bias1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(model.step_count));
            const double bias2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(model.step_count));
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                adam_update(model.layers[l].w.data, model.moments[l].m_w.data,
                            model.moments[l].v_w.data, grads[l].w.data, cfg, bias1, bias2);
                adam_update(model.layers[l].b, model.moments[l].m_b, model.moments[l].v_b,
                            grads[l].b, cfg, bias1, bias2);
            }
        }
        report.epochs_run = epoch;
        report.final_train_accuracy = train_accuracy(model, labeled);
        if (report.final_train_accuracy >= cfg.target_train_accuracy) {
            report.threshold_reached = true;
            break;
        }
    }
    return {std::move(model), report};
}

}  // namespace palearn
