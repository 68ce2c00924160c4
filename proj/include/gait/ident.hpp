#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gait/errors.hpp"

namespace gait {

// Fixed feature order: gait height, gait width, gait length, length symmetry,
// length variation, step time, stride time, swing time, double support time,
// velocity.
constexpr int kIdentFeatureDim = 10;

struct GaitSequence {
    Eigen::MatrixXd features;  // steps x kIdentFeatureDim
    int label = 0;
};

struct SequenceWindow {
    Eigen::MatrixXd x;             // window x kIdentFeatureDim, zero padded
    std::vector<uint8_t> mask;     // 1 = real step, 0 = padding
    int label = 0;
    int sequence_id = 0;
};

// Non-overlapping windows; the final short window is zero padded and masked.
std::vector<SequenceWindow> segment(const GaitSequence& seq, int window);

struct IdentConfig {
    int d_model = 32;
    int n_heads = 4;
    int n_layers = 2;
    int d_ff = 128;
    int window = 128;
    int n_classes = 6;
    double dropout = 0.1;

    void validate() const;
};

// A named parameter tensor with its gradient accumulator.
struct Param {
    std::string name;
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;
};

// Encoder-only Transformer classifier: linear embedding + positional
// encodings, post-LN encoder blocks (masked multi-head self-attention,
// feed-forward, residuals), masked mean pooling, linear class head.
class IdentModel {
public:
    IdentModel(const IdentConfig& cfg, uint64_t seed);

    const IdentConfig& config() const { return cfg_; }
    std::vector<Param>& params() { return params_; }
    const std::vector<Param>& params() const { return params_; }

    // Class probabilities, eval mode (dropout off). Rows sum to 1.
    Eigen::VectorXd forward(const SequenceWindow& w) const;

    // Mean cross-entropy over the batch; accumulates analytic gradients into
    // params(). Dropout is active only when `train` is set; rng drives the
    // dropout masks.
    double loss_and_grad(const std::vector<SequenceWindow>& batch, bool train,
                         std::mt19937_64* rng);

    void zero_grad();

    void save(const std::string& path) const;
    static IdentModel load(const std::string& path);

private:
    IdentConfig cfg_;
    std::vector<Param> params_;
};

// Max relative error between analytic and central-difference gradients over
// >= n_coords randomly sampled coordinates covering every parameter tensor.
double grad_check(IdentModel& model, const std::vector<SequenceWindow>& batch,
                  double epsilon, uint64_t seed, int n_coords = 200);

struct TrainConfig {
    int window = 128;
    int folds = 10;
    int epochs = 50;
    double learning_rate = 1e-3;
    uint64_t seed = 0;
    double dropout = 0.1;
    IdentConfig model;
};

struct KFoldResult {
    std::vector<double> fold_accuracy;          // per fold, in [0, 1]
    double mean_accuracy = 0.0;
    Eigen::MatrixXi confusion;                  // rows = truth, cols = predicted
};

// Stratified k-fold cross-validation over whole sequences (walking cycles),
// with per-feature z-scoring from training-fold statistics only.
// Deterministic given cfg.seed.
KFoldResult train_kfold(const std::vector<GaitSequence>& dataset, const TrainConfig& cfg);

}  // namespace gait
