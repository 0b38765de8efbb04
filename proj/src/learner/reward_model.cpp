#include "hybrid_tetris/learner/reward_model.hpp"

#include <cmath>
#include <string>

#include "hybrid_tetris/error.hpp"
#include "hybrid_tetris/hash.hpp"

namespace hybrid_tetris::learner {

using nlohmann::json;

namespace {

void check_input(const RewardModel& model, std::span<const double> features) {
    if (features.size() != model.input_size()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "model expects " + std::to_string(model.input_size()) + " features, got " +
                        std::to_string(features.size()));
    }
}

// Hidden activations of the MLP.
std::vector<double> hidden_layer(const RewardModel& model, std::span<const double> x) {
    const auto w = model.weights();
    const std::size_t d = model.input_size();
    const std::size_t h = model.hidden_width();
    const std::size_t b1 = h * d;
    std::vector<double> act(h);
    for (std::size_t j = 0; j < h; ++j) {
        double a = w[b1 + j];
        const double* row = w.data() + j * d;
        for (std::size_t i = 0; i < d; ++i) {
            a += row[i] * x[i];
        }
        act[j] = std::tanh(a);
    }
    return act;
}

void add_output_gradient(const RewardModel& model, std::span<const double> x, double scale,
                         std::vector<double>& grad) {
    if (model.architecture() == Architecture::linear) {
        const std::size_t d = model.input_size();
        for (std::size_t i = 0; i < d; ++i) {
            grad[i] += scale * x[i];
        }
        grad[d] += scale;
        return;
    }
    const auto w = model.weights();
    const std::size_t d = model.input_size();
    const std::size_t h = model.hidden_width();
    const std::size_t b1 = h * d;
    const std::size_t w2 = b1 + h;
    const std::size_t b2 = w2 + h;
    const auto act = hidden_layer(model, x);
    for (std::size_t j = 0; j < h; ++j) {
        const double back = scale * w[w2 + j] * (1.0 - act[j] * act[j]);
        double* row = grad.data() + j * d;
        for (std::size_t i = 0; i < d; ++i) {
            row[i] += back * x[i];
        }
        grad[b1 + j] += back;
        grad[w2 + j] += scale * act[j];
    }
    grad[b2] += scale;
}

double residual(const RewardModel& model, const CreditedSample& sample) {
    double r = predict(model, sample.features) - sample.label;
    if (!sample.reference.empty()) {
        r -= predict(model, sample.reference);
    }
    return r;
}

}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {
    items_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayBuffer::push(CreditedSample sample) {
    if (items_.size() < capacity_) {
        items_.push_back(std::move(sample));
    } else {
        items_[next_] = std::move(sample);
    }
    next_ = (next_ + 1) % capacity_;
}

RewardModel::RewardModel(Architecture arch, std::size_t inputs, std::size_t hidden,
                         Hyperparams hyperparams, std::uint64_t seed)
    : architecture_(arch),
      inputs_(inputs),
      hidden_(arch == Architecture::mlp ? hidden : 0),
      hyperparams_(hyperparams),
      weights_(parameter_count(arch, inputs, hidden_), 0.0),
      buffer_(hyperparams.buffer_capacity),
      sampler_(mix_seed(seed ^ 0x73616d706c6572ULL)) {
    if (inputs == 0) {
        throw Error(ErrorCode::dimension_mismatch, "reward model needs at least one input");
    }
}

std::size_t RewardModel::parameter_count(Architecture arch, std::size_t inputs, std::size_t hidden) {
    if (arch == Architecture::linear) {
        return inputs + 1;
    }
    return hidden * inputs + hidden + hidden + 1;
}

RewardModel RewardModel::linear(std::size_t inputs, Hyperparams hyperparams, std::uint64_t seed) {
    return RewardModel(Architecture::linear, inputs, 0, hyperparams, seed);
}

RewardModel RewardModel::mlp(std::size_t inputs, std::size_t hidden, Hyperparams hyperparams,
                             std::uint64_t seed) {
    if (hidden == 0) {
        throw Error(ErrorCode::dimension_mismatch, "mlp hidden width must be positive");
    }
    RewardModel model(Architecture::mlp, inputs, hidden, hyperparams, seed);
    Rng init(mix_seed(seed ^ 0x696e6974ULL));
    const double a1 = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
    const double a2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
    for (std::size_t k = 0; k < hidden * inputs; ++k) {
        model.weights_[k] = (2.0 * init.unit() - 1.0) * a1;
    }
    const std::size_t w2 = hidden * inputs + hidden;
    for (std::size_t j = 0; j < hidden; ++j) {
        model.weights_[w2 + j] = (2.0 * init.unit() - 1.0) * a2;
    }
    return model;
}

void RewardModel::set_weights(std::vector<double> weights) {
    if (weights.size() != weights_.size()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "model has " + std::to_string(weights_.size()) + " parameters, got " +
                        std::to_string(weights.size()));
    }
    weights_ = std::move(weights);
}

void RewardModel::set_hyperparams(const Hyperparams& hyperparams) {
    hyperparams_ = hyperparams;
}

double predict(const RewardModel& model, std::span<const double> features) {
    check_input(model, features);
    const auto w = model.weights();
    if (model.architecture() == Architecture::linear) {
        const std::size_t d = model.input_size();
        double sum = w[d];
        for (std::size_t i = 0; i < d; ++i) {
            sum += w[i] * features[i];
        }
        return sum;
    }
    const std::size_t d = model.input_size();
    const std::size_t h = model.hidden_width();
    const std::size_t w2 = h * d + h;
    const auto act = hidden_layer(model, features);
    double out = w[w2 + h];
    for (std::size_t j = 0; j < h; ++j) {
        out += w[w2 + j] * act[j];
    }
    return out;
}

std::vector<double> output_gradient(const RewardModel& model, std::span<const double> features) {
    check_input(model, features);
    std::vector<double> grad(model.weights().size(), 0.0);
    add_output_gradient(model, features, 1.0, grad);
    return grad;
}

double sample_loss(const RewardModel& model, const CreditedSample& sample) {
    const double r = residual(model, sample);
    return sample.weight * r * r;
}

std::vector<double> loss_gradient(const RewardModel& model, const CreditedSample& sample) {
    const double r = residual(model, sample);
    std::vector<double> grad(model.weights().size(), 0.0);
    const double scale = 2.0 * sample.weight * r;
    add_output_gradient(model, sample.features, scale, grad);
    if (!sample.reference.empty()) {
        add_output_gradient(model, sample.reference, -scale, grad);
    }
    return grad;
}

RewardModel update(RewardModel model, std::span<const CreditedSample> samples) {
    if (samples.empty()) {
        throw Error(ErrorCode::empty_sample_list, "update needs at least one sample");
    }
    for (const auto& s : samples) {
        check_input(model, s.features);
        if (!s.reference.empty()) {
            check_input(model, s.reference);
        }
        model.buffer_.push(s);
        ++model.sample_count_;
    }
    const auto& hp = model.hyperparams_;
    const std::size_t batch = std::max<std::size_t>(1, hp.minibatch_size);
    std::vector<double> step(model.weights_.size());
    for (std::size_t u = 0; u < hp.updates_per_feedback; ++u) {
        std::fill(step.begin(), step.end(), 0.0);
        for (std::size_t b = 0; b < batch; ++b) {
            const auto& s = model.buffer_[static_cast<std::size_t>(model.sampler_.below(model.buffer_.size()))];
            const double scale = 2.0 * s.weight * residual(model, s);
            add_output_gradient(model, s.features, scale, step);
            if (!s.reference.empty()) {
                add_output_gradient(model, s.reference, -scale, step);
            }
        }
        const double lr = hp.learning_rate / static_cast<double>(batch);
        for (std::size_t k = 0; k < step.size(); ++k) {
            model.weights_[k] -= lr * step[k];
        }
    }
    return model;
}

std::uint64_t weights_digest(const RewardModel& model) {
    Fnv1a h;
    for (const double w : model.weights()) {
        h.f64(w);
    }
    return h.value();
}

void to_json(json& j, const Hyperparams& hp) {
    j = json{{"learningRate", hp.learning_rate},
             {"bufferCapacity", hp.buffer_capacity},
             {"minibatchSize", hp.minibatch_size},
             {"updatesPerFeedback", hp.updates_per_feedback}};
}

void from_json(const json& j, Hyperparams& hp) {
    const Hyperparams defaults;
    hp.learning_rate = j.value("learningRate", defaults.learning_rate);
    hp.buffer_capacity = j.value("bufferCapacity", defaults.buffer_capacity);
    hp.minibatch_size = j.value("minibatchSize", defaults.minibatch_size);
    hp.updates_per_feedback = j.value("updatesPerFeedback", defaults.updates_per_feedback);
}

json checkpoint_json(const RewardModel& model) {
    return json{{"architecture", model.architecture() == Architecture::linear ? "linear" : "mlp"},
                {"inputSize", model.input_size()},
                {"hiddenWidth", model.hidden_width()},
                {"hyperparams", model.hyperparams()},
                {"weights", std::vector<double>(model.weights().begin(), model.weights().end())},
                {"sampleCount", model.sample_count()},
                {"digest", to_hex(weights_digest(model))}};
}

RewardModel model_from_checkpoint(const json& doc, std::uint64_t seed) {
    try {
        const auto arch = doc.at("architecture").get<std::string>();
        const auto inputs = doc.at("inputSize").get<std::size_t>();
        const auto hp = doc.at("hyperparams").get<Hyperparams>();
        RewardModel model = arch == "linear"
                                 ? RewardModel::linear(inputs, hp, seed)
                                 : RewardModel::mlp(inputs, doc.at("hiddenWidth").get<std::size_t>(), hp, seed);
        if (arch != "linear" && arch != "mlp") {
            throw Error(ErrorCode::corrupt_log, "unknown architecture '" + arch + "'");
        }
        model.set_weights(doc.at("weights").get<std::vector<double>>());
        model.set_sample_count(doc.at("sampleCount").get<std::uint64_t>());
        if (to_hex(weights_digest(model)) != doc.at("digest").get<std::string>()) {
            throw Error(ErrorCode::corrupt_log, "checkpoint digest does not match its weights");
        }
        return model;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::corrupt_log, std::string("malformed model checkpoint: ") + e.what());
    }
}

}  // namespace hybrid_tetris::learner
