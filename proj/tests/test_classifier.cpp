#include <cmath>
#include <stdexcept>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "specgame/classifier.hpp"
#include "specgame/rng.hpp"
#include "specgame/waveform.hpp"

using namespace specgame;

TEST_SUITE_BEGIN("classifier");

namespace {

// Tiny instance keeps the finite-difference sweep cheap while exercising
// every layer.
ClassifierModel tiny_model(std::uint64_t seed) {
    ClassifierModel m;
    m.samples = 6;
    m.n_filters = 3;
    m.dense_width = 4;
    m.params.resize(m.n_params());
    RngStream r(RngSeed{seed, 0});
    for (auto& w : m.params) w = r.uniform01() - 0.5;
    return m;
}

std::vector<IqFrame> tiny_batch(int n, int samples) {
    std::vector<IqFrame> batch;
    ChannelParams ch{1.0, 3.0, samples};
    for (int k = 0; k < n; ++k)
        batch.push_back(gen_frame(k % 2 == 0, ch, {77, static_cast<std::uint64_t>(k)}));
    return batch;
}

// Central finite differences against the analytic gradient, elementwise.
void gradcheck(ClassifierModel m, const std::vector<IqFrame>& batch,
               const std::vector<int>& labels, const std::vector<double>* masks) {
    std::vector<double> grad;
    detail::loss_and_grad(m, batch, labels, grad, masks);
    REQUIRE(grad.size() == m.params.size());
    double worst = 0;
    for (std::size_t k = 0; k < m.params.size(); ++k) {
        double orig = m.params[k];
        double h = 1e-5 * std::max(1.0, std::abs(orig));
        std::vector<double> tmp;
        m.params[k] = orig + h;
        double up = detail::loss_and_grad(m, batch, labels, tmp, masks);
        m.params[k] = orig - h;
        double dn = detail::loss_and_grad(m, batch, labels, tmp, masks);
        m.params[k] = orig;
        double numeric = (up - dn) / (2 * h);
        double rel = std::abs(grad[k] - numeric) / std::max({std::abs(grad[k]), std::abs(numeric), 1e-6});
        worst = std::max(worst, rel);
    }
    CHECK(worst < 1e-4);
}

}  // namespace

TEST_CASE("analytic gradient matches finite differences") {
    ClassifierModel m = tiny_model(3);
    auto batch = tiny_batch(5, m.samples);
    std::vector<int> labels{1, 0, 1, 0, 0};
    gradcheck(m, batch, labels, nullptr);
}

TEST_CASE("gradient check holds on the dropout path") {
    ClassifierModel m = tiny_model(4);
    auto batch = tiny_batch(4, m.samples);
    std::vector<int> labels{1, 0, 0, 1};
    // Fixed masks: entry is 0 or 1/keep, per batch element and hidden unit.
    std::vector<double> masks(batch.size() * m.dense_width, 1.0 / 0.9);
    masks[1] = 0.0;
    masks[6] = 0.0;
    masks[11] = 0.0;
    gradcheck(m, batch, labels, &masks);
}

TEST_CASE("softmax outputs normalize and bound confidence") {
    ClassifierModel m = tiny_model(5);
    auto frames = tiny_batch(20, m.samples);
    for (const auto& f : frames) {
        auto pr = predict_proba(m, f);
        CHECK(pr[0] >= 0.0);
        CHECK(pr[1] >= 0.0);
        CHECK(std::abs(pr[0] + pr[1] - 1.0) < 1e-12);
        Prediction p = predict(m, f);
        CHECK(p.confidence == doctest::Approx(std::max(pr[0], pr[1])).epsilon(1e-12));
        CHECK(p.confidence >= 0.5);
        CHECK(p.confidence <= 1.0);
        CHECK(p.label == (pr[1] > pr[0] ? 1 : 0));
    }
}

TEST_CASE("training is deterministic and lowers the loss") {
    OccupancyProcess occ{0.5};
    ChannelParams ch;
    auto data = gen_dataset(160, occ, ch, {13, 0});
    TrainConfig cfg;
    cfg.epochs = 8;
    cfg.seed = {13, 1000};
    ClassifierModel a = train(data, cfg);
    ClassifierModel b = train(data, cfg);
    CHECK(a.params == b.params);
    CHECK(a.final_train_loss <= a.initial_train_loss);

    cfg.seed = {13, 1001};
    ClassifierModel c = train(data, cfg);
    CHECK(a.params != c.params);
}

TEST_CASE("single-class training data is rejected") {
    ChannelParams ch;
    std::vector<IqFrame> data;
    for (int k = 0; k < 40; ++k) data.push_back(gen_frame(false, ch, {5, static_cast<std::uint64_t>(k)}));
    TrainConfig cfg;
    cfg.epochs = 1;
    CHECK_THROWS_AS(train(data, cfg), std::invalid_argument);
}

TEST_CASE("evaluate identities") {
    ClassifierModel m = tiny_model(6);
    auto frames = tiny_batch(30, m.samples);
    auto preds = predict_many(m, frames);
    std::vector<int> agree, invert;
    for (const auto& p : preds) {
        agree.push_back(p.label);
        invert.push_back(1 - p.label);
    }
    CHECK(evaluate(m, frames, agree) == doctest::Approx(1.0));
    CHECK(evaluate(m, frames, invert) == doctest::Approx(0.0));
}

TEST_CASE("short training separates an easy 20 dB channel") {
    OccupancyProcess occ{0.5};
    ChannelParams easy{1.0, 20.0, 16};
    auto data = gen_dataset(400, occ, easy, {17, 0});
    TrainConfig cfg;
    cfg.epochs = 15;
    cfg.seed = {17, 1000};
    ClassifierModel m = train(data, cfg);
    auto probe = gen_dataset(400, occ, easy, {18, 0});
    CHECK(evaluate(m, probe) > 0.95);
    // Occupied frames at this SNR should be called with high confidence.
    double min_conf_correct = 1.0;
    int correct_occ = 0, total_occ = 0;
    for (const auto& f : probe) {
        if (!f.occupied) continue;
        ++total_occ;
        Prediction p = predict(m, f);
        if (p.label == 1) {
            ++correct_occ;
            min_conf_correct = std::min(min_conf_correct, p.confidence);
        }
    }
    CHECK(correct_occ > total_occ * 9 / 10);
    double mean_conf = 0;
    int n = 0;
    for (const auto& f : probe)
        if (f.occupied) {
            Prediction p = predict(m, f);
            if (p.label == 1) {
                mean_conf += p.confidence;
                ++n;
            }
        }
    CHECK(mean_conf / n > 0.9);
}

TEST_CASE("model files round-trip bit-exactly") {
    OccupancyProcess occ{0.5};
    ChannelParams ch;
    auto data = gen_dataset(120, occ, ch, {19, 0});
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.seed = {19, 1000};
    ClassifierModel m = train(data, cfg);
    m.train_accuracy = 0.9875;
    std::string path = "model_roundtrip_test.txt";
    save_model(m, path);
    ClassifierModel r = load_model(path);
    CHECK(r.params == m.params);  // bitwise, not approximate
    CHECK(r.samples == m.samples);
    CHECK(r.n_filters == m.n_filters);
    CHECK(r.dense_width == m.dense_width);
    CHECK(r.dropout_rate == m.dropout_rate);
    CHECK(r.train_seed == m.train_seed);
    CHECK(r.train_accuracy == m.train_accuracy);
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_model("no_such_model_file.txt"), std::runtime_error);
}

TEST_SUITE_END();
