#include "specgame/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace specgame {

namespace {

void check_frame(const ClassifierModel& m, const IqFrame& f) {
    if (static_cast<int>(f.i.size()) != m.samples || static_cast<int>(f.q.size()) != m.samples)
        throw std::invalid_argument("frame shape does not match model input");
}

void resize_ws(const ClassifierModel& m, ClassifierWorkspace& ws) {
    ws.z1.resize(m.flat_size());
    ws.a1.resize(m.flat_size());
    ws.z2.resize(m.dense_width);
    ws.a2.resize(m.dense_width);
    ws.a2d.resize(m.dense_width);
    ws.z3.resize(2);
    ws.p.resize(2);
    ws.dz3.resize(2);
    ws.da2.resize(m.dense_width);
    ws.dz2.resize(m.dense_width);
    ws.dv.resize(m.flat_size());
    ws.dz1.resize(m.flat_size());
}

}  // namespace

namespace detail {

void forward(const ClassifierModel& m, const IqFrame& frame, ClassifierWorkspace& ws,
             const double* dropout_mask) {
    check_frame(m, frame);
    resize_ws(m, ws);
    const int F = m.n_filters, H = m.dense_width, W = m.conv_out_w();
    const int flat = m.flat_size();
    const double* cw = m.params.data() + m.off_conv_w();
    const double* cb = m.params.data() + m.off_conv_b();
    const double* w1 = m.params.data() + m.off_fc1_w();
    const double* b1 = m.params.data() + m.off_fc1_b();
    const double* w2 = m.params.data() + m.off_fc2_w();
    const double* b2 = m.params.data() + m.off_fc2_b();

    for (int f = 0; f < F; ++f) {
        const double k0 = cw[f * 3], k1 = cw[f * 3 + 1], k2 = cw[f * 3 + 2], b = cb[f];
        for (int r = 0; r < 2; ++r) {
            const double* x = (r == 0 ? frame.i.data() : frame.q.data());
            double* z = ws.z1.data() + (f * 2 + r) * W;
            double* a = ws.a1.data() + (f * 2 + r) * W;
            for (int c = 0; c < W; ++c) {
                double v = b + k0 * x[c] + k1 * x[c + 1] + k2 * x[c + 2];
                z[c] = v;
                a[c] = v > 0.0 ? v : 0.0;
            }
        }
    }
    for (int h = 0; h < H; ++h) {
        const double* row = w1 + static_cast<std::size_t>(h) * flat;
        double acc = b1[h];
        for (int j = 0; j < flat; ++j) acc += row[j] * ws.a1[j];
        ws.z2[h] = acc;
        double a = acc > 0.0 ? acc : 0.0;
        ws.a2[h] = a;
        ws.a2d[h] = dropout_mask ? a * dropout_mask[h] : a;
    }
    for (int o = 0; o < 2; ++o) {
        const double* row = w2 + static_cast<std::size_t>(o) * H;
        double acc = b2[o];
        for (int h = 0; h < H; ++h) acc += row[h] * ws.a2d[h];
        ws.z3[o] = acc;
    }
    double zmax = std::max(ws.z3[0], ws.z3[1]);
    double e0 = std::exp(ws.z3[0] - zmax), e1 = std::exp(ws.z3[1] - zmax);
    ws.p[0] = e0 / (e0 + e1);
    ws.p[1] = e1 / (e0 + e1);
}

double loss_and_grad(const ClassifierModel& m, const std::vector<IqFrame>& batch,
                     const std::vector<int>& labels, std::vector<double>& grad,
                     const std::vector<double>* dropout_masks) {
    if (batch.empty() || batch.size() != labels.size())
        throw std::invalid_argument("loss_and_grad: batch/label size mismatch");
    const int F = m.n_filters, H = m.dense_width, W = m.conv_out_w();
    const int flat = m.flat_size();
    grad.assign(m.n_params(), 0.0);
    double* g_cw = grad.data() + m.off_conv_w();
    double* g_cb = grad.data() + m.off_conv_b();
    double* g_w1 = grad.data() + m.off_fc1_w();
    double* g_b1 = grad.data() + m.off_fc1_b();
    double* g_w2 = grad.data() + m.off_fc2_w();
    double* g_b2 = grad.data() + m.off_fc2_b();
    const double* w1 = m.params.data() + m.off_fc1_w();
    const double* w2 = m.params.data() + m.off_fc2_w();

    ClassifierWorkspace ws;
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    for (std::size_t s = 0; s < batch.size(); ++s) {
        const double* mask =
            dropout_masks ? dropout_masks->data() + s * static_cast<std::size_t>(H) : nullptr;
        forward(m, batch[s], ws, mask);
        int y = labels[s];
        // Clamp keeps the loss finite on saturated mispredictions; gradient
        // formulas below do not depend on this clamp.
        loss -= std::log(std::max(ws.p[y], 1e-300)) * inv_b;

        ws.dz3[0] = (ws.p[0] - (y == 0 ? 1.0 : 0.0)) * inv_b;
        ws.dz3[1] = (ws.p[1] - (y == 1 ? 1.0 : 0.0)) * inv_b;
        for (int o = 0; o < 2; ++o) {
            double d = ws.dz3[o];
            double* gr = g_w2 + static_cast<std::size_t>(o) * H;
            for (int h = 0; h < H; ++h) gr[h] += d * ws.a2d[h];
            g_b2[o] += d;
        }
        for (int h = 0; h < H; ++h) {
            double d = w2[h] * ws.dz3[0] + w2[H + h] * ws.dz3[1];
            if (mask) d *= mask[h];
            ws.dz2[h] = ws.z2[h] > 0.0 ? d : 0.0;
        }
        std::fill(ws.dv.begin(), ws.dv.end(), 0.0);
        for (int h = 0; h < H; ++h) {
            double d = ws.dz2[h];
            if (d == 0.0) continue;
            const double* row = w1 + static_cast<std::size_t>(h) * flat;
            double* gr = g_w1 + static_cast<std::size_t>(h) * flat;
            for (int j = 0; j < flat; ++j) {
                gr[j] += d * ws.a1[j];
                ws.dv[j] += d * row[j];
            }
            g_b1[h] += d;
        }
        for (int f = 0; f < F; ++f) {
            double gk0 = 0.0, gk1 = 0.0, gk2 = 0.0, gb = 0.0;
            for (int r = 0; r < 2; ++r) {
                const double* x = (r == 0 ? batch[s].i.data() : batch[s].q.data());
                const double* z = ws.z1.data() + (f * 2 + r) * W;
                const double* dv = ws.dv.data() + (f * 2 + r) * W;
                for (int c = 0; c < W; ++c) {
                    if (z[c] <= 0.0) continue;
                    double d = dv[c];
                    gk0 += d * x[c];
                    gk1 += d * x[c + 1];
                    gk2 += d * x[c + 2];
                    gb += d;
                }
            }
            g_cw[f * 3] += gk0;
            g_cw[f * 3 + 1] += gk1;
            g_cw[f * 3 + 2] += gk2;
            g_cb[f] += gb;
        }
    }
    return loss;
}

}  // namespace detail

ClassifierModel train(const std::vector<IqFrame>& data, const std::vector<int>& labels,
                      const TrainConfig& cfg, int samples, int n_filters, int dense_width) {
    if (data.empty() || data.size() != labels.size())
        throw std::invalid_argument("train: data/label size mismatch");
    if (cfg.epochs < 1 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0))
        throw std::invalid_argument("train: bad TrainConfig");
    bool has0 = false, has1 = false;
    for (int y : labels) {
        if (y == 0) has0 = true;
        else if (y == 1) has1 = true;
        else throw std::invalid_argument("train: labels must be 0 or 1");
    }
    if (!has0 || !has1) throw std::invalid_argument("train: single-class training set");

    ClassifierModel m;
    m.samples = samples;
    m.n_filters = n_filters;
    m.dense_width = dense_width;
    m.train_seed = cfg.seed.master_seed;
    m.params.assign(m.n_params(), 0.0);

    RngStream rng(cfg.seed);
    auto glorot = [&rng](double* w, std::size_t n, double fan_in, double fan_out) {
        double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (std::size_t k = 0; k < n; ++k) w[k] = limit * (2.0 * rng.uniform01() - 1.0);
    };
    glorot(m.params.data() + m.off_conv_w(), static_cast<std::size_t>(n_filters) * 3, 3.0,
           3.0 * n_filters);
    glorot(m.params.data() + m.off_fc1_w(),
           static_cast<std::size_t>(dense_width) * m.flat_size(), m.flat_size(), dense_width);
    glorot(m.params.data() + m.off_fc2_w(), static_cast<std::size_t>(2) * dense_width,
           dense_width, 2.0);

    const std::size_t n = data.size();
    const int H = dense_width;
    const double keep = 1.0 - m.dropout_rate;
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    std::vector<double> grad(m.n_params());
    std::vector<double> adam_m(m.n_params(), 0.0), adam_v(m.n_params(), 0.0);
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    long t = 0;
    std::vector<IqFrame> batch;
    std::vector<int> batch_y;
    std::vector<double> masks;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t k = n - 1; k > 0; --k) {
            std::size_t j = static_cast<std::size_t>(rng.below(k + 1));
            std::swap(order[k], order[j]);
        }
        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            std::size_t stop = std::min(n, start + cfg.batch_size);
            batch.clear();
            batch_y.clear();
            for (std::size_t k = start; k < stop; ++k) {
                batch.push_back(data[order[k]]);
                batch_y.push_back(labels[order[k]]);
            }
            const std::vector<double>* mask_ptr = nullptr;
            if (m.dropout_rate > 0.0) {
                masks.resize(batch.size() * static_cast<std::size_t>(H));
                for (double& v : masks) v = rng.uniform01() < keep ? 1.0 / keep : 0.0;
                mask_ptr = &masks;
            }
            double loss = detail::loss_and_grad(m, batch, batch_y, grad, mask_ptr);
            if (!std::isfinite(loss))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch));
            epoch_loss += loss;
            ++n_batches;
            ++t;
            double corr1 = 1.0 - std::pow(b1, static_cast<double>(t));
            double corr2 = 1.0 - std::pow(b2, static_cast<double>(t));
            for (std::size_t k = 0; k < m.params.size(); ++k) {
                adam_m[k] = b1 * adam_m[k] + (1.0 - b1) * grad[k];
                adam_v[k] = b2 * adam_v[k] + (1.0 - b2) * grad[k] * grad[k];
                m.params[k] -= cfg.learning_rate * (adam_m[k] / corr1) /
                               (std::sqrt(adam_v[k] / corr2) + eps);
            }
        }
        epoch_loss /= static_cast<double>(n_batches);
        if (epoch == 0) m.initial_train_loss = epoch_loss;
        m.final_train_loss = epoch_loss;
    }
    return m;
}

ClassifierModel train(const std::vector<IqFrame>& data, const TrainConfig& cfg) {
    std::vector<int> labels(data.size());
    for (std::size_t k = 0; k < data.size(); ++k) labels[k] = data[k].occupied ? 1 : 0;
    int samples = data.empty() ? 16 : static_cast<int>(data[0].i.size());
    return train(data, labels, cfg, samples);
}

Prediction predict(const ClassifierModel& m, const IqFrame& frame) {
    ClassifierWorkspace ws;
    detail::forward(m, frame, ws);
    Prediction out;
    out.label = ws.p[1] > ws.p[0] ? 1 : 0;
    out.confidence = ws.p[out.label];
    return out;
}

std::vector<Prediction> predict_many(const ClassifierModel& m, const std::vector<IqFrame>& frames) {
    ClassifierWorkspace ws;
    std::vector<Prediction> out;
    out.reserve(frames.size());
    for (const auto& f : frames) {
        detail::forward(m, f, ws);
        Prediction p;
        p.label = ws.p[1] > ws.p[0] ? 1 : 0;
        p.confidence = ws.p[p.label];
        out.push_back(p);
    }
    return out;
}

std::array<double, 2> predict_proba(const ClassifierModel& m, const IqFrame& frame) {
    ClassifierWorkspace ws;
    detail::forward(m, frame, ws);
    return {ws.p[0], ws.p[1]};
}

double evaluate(const ClassifierModel& m, const std::vector<IqFrame>& test_set,
                const std::vector<int>& labels) {
    if (test_set.empty() || test_set.size() != labels.size())
        throw std::invalid_argument("evaluate: empty test set or size mismatch");
    ClassifierWorkspace ws;
    std::size_t correct = 0;
    for (std::size_t k = 0; k < test_set.size(); ++k) {
        detail::forward(m, test_set[k], ws);
        int label = ws.p[1] > ws.p[0] ? 1 : 0;
        if (label == labels[k]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test_set.size());
}

double evaluate(const ClassifierModel& m, const std::vector<IqFrame>& test_set) {
    std::vector<int> labels(test_set.size());
    for (std::size_t k = 0; k < test_set.size(); ++k) labels[k] = test_set[k].occupied ? 1 : 0;
    return evaluate(m, test_set, labels);
}

void save_model(const ClassifierModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    char buf[40];
    auto hex = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%a", v);
        return std::string(buf);
    };
    out << "specgame-classifier v1\n";
    out << "samples " << m.samples << "\n";
    out << "filters " << m.n_filters << "\n";
    out << "dense " << m.dense_width << "\n";
    out << "dropout " << hex(m.dropout_rate) << "\n";
    out << "seed " << m.train_seed << "\n";
    out << "accuracy " << hex(m.train_accuracy) << "\n";
    out << "loss " << hex(m.initial_train_loss) << " " << hex(m.final_train_loss) << "\n";
    out << "params " << m.params.size() << "\n";
    for (double v : m.params) out << hex(v) << "\n";
    out << "end\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

ClassifierModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    auto fail = [&path](const std::string& what) {
        throw std::runtime_error(path + ": " + what);
    };
    std::string line;
    if (!std::getline(in, line) || line != "specgame-classifier v1") fail("bad header");
    ClassifierModel m;
    std::string key, tok;
    std::size_t n_params = 0;
    auto expect = [&](const char* name) {
        if (!(in >> key) || key != name) fail(std::string("expected key ") + name);
    };
    // Stream extraction does not accept hexfloat, so doubles go through strtod.
    auto read_double = [&]() {
        if (!(in >> tok)) fail("truncated file");
        char* endp = nullptr;
        double v = std::strtod(tok.c_str(), &endp);
        if (endp == tok.c_str() || *endp != '\0') fail("bad number: " + tok);
        return v;
    };
    expect("samples");
    in >> m.samples;
    expect("filters");
    in >> m.n_filters;
    expect("dense");
    in >> m.dense_width;
    expect("dropout");
    m.dropout_rate = read_double();
    expect("seed");
    in >> m.train_seed;
    expect("accuracy");
    m.train_accuracy = read_double();
    expect("loss");
    m.initial_train_loss = read_double();
    m.final_train_loss = read_double();
    expect("params");
    in >> n_params;
    if (!in || m.samples < 3 || m.n_filters < 1 || m.dense_width < 1) fail("bad shape fields");
    if (n_params != m.n_params()) fail("parameter count does not match shape");
    m.params.resize(n_params);
    for (std::size_t k = 0; k < n_params; ++k) m.params[k] = read_double();
    if (!(in >> key) || key != "end") fail("missing end marker");
    return m;
}

}  // namespace specgame
