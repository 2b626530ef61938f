#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "specgame/rng.hpp"
#include "specgame/waveform.hpp"

namespace specgame {

// Two-class convolutional classifier. Architecture (for the default sizes):
// Conv 32 filters of kernel 1x3 sliding along the sample axis of the 2xS
// input, ReLU -> flatten -> dense 32, ReLU -> dropout 0.1 (training only)
// -> dense 2 -> softmax. Filter count, dense width and frame length are kept
// as fields so tests can run the same code on tiny instances.
struct ClassifierModel {
    int samples = 16;
    int n_filters = 32;
    int dense_width = 32;
    double dropout_rate = 0.1;

    // All weights in one flat buffer, in the order conv_w [F][3], conv_b [F],
    // fc1_w [H][flat], fc1_b [H], fc2_w [2][H], fc2_b [2], where
    // flat = F * 2 * (samples - 2).
    std::vector<double> params;

    // Training metadata, carried through save/load.
    std::uint64_t train_seed = 0;
    double train_accuracy = -1.0;  // accuracy recorded by the trainer's caller, -1 if unset
    double initial_train_loss = 0.0;
    double final_train_loss = 0.0;

    int conv_out_w() const { return samples - 2; }
    int flat_size() const { return n_filters * 2 * conv_out_w(); }
    std::size_t off_conv_w() const { return 0; }
    std::size_t off_conv_b() const { return static_cast<std::size_t>(n_filters) * 3; }
    std::size_t off_fc1_w() const { return off_conv_b() + n_filters; }
    std::size_t off_fc1_b() const { return off_fc1_w() + static_cast<std::size_t>(dense_width) * flat_size(); }
    std::size_t off_fc2_w() const { return off_fc1_b() + dense_width; }
    std::size_t off_fc2_b() const { return off_fc2_w() + static_cast<std::size_t>(2) * dense_width; }
    std::size_t n_params() const { return off_fc2_b() + 2; }
};

struct TrainConfig {
    int epochs = 50;
    int batch_size = 32;
    double learning_rate = 1e-3;  // Adam, categorical cross-entropy
    RngSeed seed;
};

struct Prediction {
    int label = 0;          // 0 or 1
    double confidence = 0;  // softmax probability of the predicted label, in [0.5, 1]
};

// Scratch buffers for forward/backward passes; reusable across calls so the
// training and evaluation loops do not allocate per frame.
struct ClassifierWorkspace {
    std::vector<double> z1, a1, z2, a2, a2d, z3, p;
    std::vector<double> dz3, da2, dz2, dv, dz1;
};

// Trains a fresh model of the given shape. Throws std::invalid_argument if the
// labels contain a single class and std::runtime_error if the loss goes
// non-finite. Deterministic in (data, labels, cfg.seed).
ClassifierModel train(const std::vector<IqFrame>& data, const std::vector<int>& labels,
                      const TrainConfig& cfg, int samples = 16, int n_filters = 32,
                      int dense_width = 32);
// Same, with labels taken from each frame's occupancy flag.
ClassifierModel train(const std::vector<IqFrame>& data, const TrainConfig& cfg);

Prediction predict(const ClassifierModel& m, const IqFrame& frame);
std::vector<Prediction> predict_many(const ClassifierModel& m, const std::vector<IqFrame>& frames);
// Softmax output pair (p_class0, p_class1).
std::array<double, 2> predict_proba(const ClassifierModel& m, const IqFrame& frame);

double evaluate(const ClassifierModel& m, const std::vector<IqFrame>& test_set,
                const std::vector<int>& labels);
double evaluate(const ClassifierModel& m, const std::vector<IqFrame>& test_set);

// Text format with hexfloat weights; round-trips bit-exactly.
void save_model(const ClassifierModel& m, const std::string& path);
ClassifierModel load_model(const std::string& path);

namespace detail {

// Forward pass; writes softmax probabilities into ws.p. When dropout_mask is
// non-null it must hold dense_width entries (0 or 1/keep) and is applied to
// the hidden activations, which is the training-time path.
void forward(const ClassifierModel& m, const IqFrame& frame, ClassifierWorkspace& ws,
             const double* dropout_mask = nullptr);

// Mean cross-entropy over the batch plus its gradient with respect to every
// parameter (accumulated into grad, which is zeroed first). dropout_masks, if
// given, holds batch_size * dense_width entries. Exposed so tests can compare
// the analytic gradient against finite differences.
double loss_and_grad(const ClassifierModel& m, const std::vector<IqFrame>& batch,
                     const std::vector<int>& labels, std::vector<double>& grad,
                     const std::vector<double>* dropout_masks = nullptr);

}  // namespace detail

}  // namespace specgame
