#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

#include "hybrid_tetris/learner/features.hpp"
#include "hybrid_tetris/random.hpp"

namespace hybrid_tetris::learner {

enum class Architecture { linear, mlp };

struct Hyperparams {
    double learning_rate = 0.05;
    std::size_t buffer_capacity = 1000;
    std::size_t minibatch_size = 16;
    std::size_t updates_per_feedback = 10;

    bool operator==(const Hyperparams&) const = default;
};

// One credited decision. When `reference` is non-empty the regression target
// is the reward of `features` relative to `reference` (the mean afterstate of
// the same decision), i.e. the loss is
//     weight * (f(features) - f(reference) - label)^2
// otherwise it is weight * (f(features) - label)^2.
struct CreditedSample {
    FeatureVector features;
    FeatureVector reference;
    double label = 1.0;
    double weight = 1.0;
    int turn = -1;  // decision turn credited, for logs only

    bool operator==(const CreditedSample&) const = default;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 1000);

    void push(CreditedSample sample);
    std::size_t size() const noexcept { return items_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return items_.empty(); }
    const CreditedSample& operator[](std::size_t i) const { return items_[i]; }

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<CreditedSample> items_;
};

class RewardModel {
public:
    // Parameters: one weight per feature followed by a bias; all zero.
    static RewardModel linear(std::size_t inputs, Hyperparams hyperparams = {},
                              std::uint64_t seed = 0);

    // One tanh hidden layer. Parameters are laid out as
    //   W1 (hidden x inputs, row-major), b1 (hidden), w2 (hidden), b2.
    // W1 and w2 are Glorot-uniform from `seed`; biases start at zero.
    static RewardModel mlp(std::size_t inputs, std::size_t hidden, Hyperparams hyperparams = {},
                           std::uint64_t seed = 0);

    Architecture architecture() const noexcept { return architecture_; }
    std::size_t input_size() const noexcept { return inputs_; }
    std::size_t hidden_width() const noexcept { return hidden_; }
    const Hyperparams& hyperparams() const noexcept { return hyperparams_; }
    const ReplayBuffer& buffer() const noexcept { return buffer_; }
    std::uint64_t sample_count() const noexcept { return sample_count_; }

    std::span<const double> weights() const noexcept { return weights_; }
    // Throws Error(dimension_mismatch) when the size differs.
    void set_weights(std::vector<double> weights);
    void set_hyperparams(const Hyperparams& hyperparams);
    void set_sample_count(std::uint64_t count) { sample_count_ = count; }

    static std::size_t parameter_count(Architecture arch, std::size_t inputs, std::size_t hidden);

    friend RewardModel update(RewardModel model, std::span<const CreditedSample> samples);

private:
    RewardModel(Architecture arch, std::size_t inputs, std::size_t hidden, Hyperparams hyperparams,
                std::uint64_t seed);

    Architecture architecture_;
    std::size_t inputs_;
    std::size_t hidden_;
    Hyperparams hyperparams_;
    std::vector<double> weights_;
    ReplayBuffer buffer_;
    Rng sampler_;
    std::uint64_t sample_count_ = 0;
};

// Throws Error(dimension_mismatch).
double predict(const RewardModel& model, std::span<const double> features);

// Gradient of predict() with respect to the parameters.
std::vector<double> output_gradient(const RewardModel& model, std::span<const double> features);

double sample_loss(const RewardModel& model, const CreditedSample& sample);
std::vector<double> loss_gradient(const RewardModel& model, const CreditedSample& sample);

// Inserts the samples into the replay buffer, then runs
// updates_per_feedback SGD steps, each over a minibatch drawn uniformly (with
// replacement) from the buffer by the model's seeded sampler.
// Throws Error(empty_sample_list).
RewardModel update(RewardModel model, std::span<const CreditedSample> samples);

// FNV-1a over the little-endian IEEE-754 bytes of the parameters.
std::uint64_t weights_digest(const RewardModel& model);

// Checkpoint document: {architecture, inputSize, hiddenWidth, hyperparams,
// weights, sampleCount, digest}.
nlohmann::json checkpoint_json(const RewardModel& model);

// Throws Error(corrupt_log) on a digest mismatch or malformed document.
RewardModel model_from_checkpoint(const nlohmann::json& doc, std::uint64_t seed = 0);

void to_json(nlohmann::json& j, const Hyperparams& hp);
void from_json(const nlohmann::json& j, Hyperparams& hp);

}  // namespace hybrid_tetris::learner
