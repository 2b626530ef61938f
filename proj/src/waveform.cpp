#include "specgame/waveform.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace specgame {

void ChannelParams::validate() const {
    if (!(rayleigh_scale > 0.0)) throw std::invalid_argument("rayleigh_scale must be > 0");
    if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db must be finite");
    // The sensing CNN convolves a width-3 kernel along the frame, so shorter
    // frames cannot flow through the pipeline at all.
    if (samples_per_frame < 3) throw std::invalid_argument("samples_per_frame must be >= 3");
}

void OccupancyProcess::validate() const {
    if (!(p_occupied >= 0.0 && p_occupied <= 1.0))
        throw std::invalid_argument("p_occupied must be in [0,1]");
}

IqFrame gen_frame(bool occupied, const ChannelParams& ch, RngSeed seed) {
    ch.validate();
    RngStream rng(seed);
    const int n = ch.samples_per_frame;
    IqFrame f;
    f.i.resize(n);
    f.q.resize(n);
    f.occupied = occupied;

    const double noise_sigma = std::sqrt(0.5);  // unit power per complex sample
    for (int k = 0; k < n; ++k) {
        f.i[k] = noise_sigma * rng.gaussian();
        f.q[k] = noise_sigma * rng.gaussian();
    }
    if (occupied) {
        // E[g^2] = 2 * scale^2 for a Rayleigh gain, and the QPSK constellation
        // {(+/-1 +/- j)/sqrt(2)} has unit energy, so amplitude A below makes
        // E[signal power] / E[noise power] = 10^(snr_db/10) exactly.
        const double snr_lin = std::pow(10.0, ch.snr_db / 10.0);
        const double amp = std::sqrt(snr_lin / (2.0 * ch.rayleigh_scale * ch.rayleigh_scale));
        const double half = std::sqrt(0.5);
        for (int k = 0; k < n; ++k) {
            double g = rng.rayleigh(ch.rayleigh_scale);
            double si = (rng.next_u64() & 1) ? half : -half;
            double sq = (rng.next_u64() & 1) ? half : -half;
            f.i[k] += amp * g * si;
            f.q[k] += amp * g * sq;
        }
    }
    return f;
}

std::vector<IqFrame> gen_dataset(int n, const OccupancyProcess& occ,
                                 const ChannelParams& ch, RngSeed seed) {
    if (n < 1) throw std::invalid_argument("gen_dataset: n must be >= 1");
    occ.validate();
    ch.validate();
    RngStream occ_rng(seed);
    std::vector<IqFrame> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        bool occupied = occ_rng.uniform01() < occ.p_occupied;
        out.push_back(gen_frame(occupied, ch,
                                RngSeed{seed.master_seed, seed.stream_index + 1 + static_cast<std::uint64_t>(k)}));
    }
    return out;
}

std::pair<std::vector<IqFrame>, std::vector<IqFrame>> split_dataset(
    const std::vector<IqFrame>& data, double train_fraction, RngSeed seed) {
    if (data.empty()) throw std::invalid_argument("split_dataset: empty dataset");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("split_dataset: train_fraction must be in (0,1)");
    const std::size_t n = data.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t k = 0; k < n; ++k) idx[k] = k;
    RngStream rng(seed);
    for (std::size_t k = n - 1; k > 0; --k) {  // Fisher-Yates
        std::size_t j = static_cast<std::size_t>(rng.below(k + 1));
        std::swap(idx[k], idx[j]);
    }
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    std::pair<std::vector<IqFrame>, std::vector<IqFrame>> out;
    out.first.reserve(n_train);
    out.second.reserve(n - n_train);
    for (std::size_t k = 0; k < n; ++k)
        (k < n_train ? out.first : out.second).push_back(data[idx[k]]);
    return out;
}

void dump_frames_csv(const std::vector<IqFrame>& frames, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const int s = frames.empty() ? 0 : static_cast<int>(frames[0].i.size());
    out << "frame_id,occupied";
    for (int k = 0; k < s; ++k) out << ",i_" << k;
    for (int k = 0; k < s; ++k) out << ",q_" << k;
    out << "\n";
    char buf[32];
    for (std::size_t id = 0; id < frames.size(); ++id) {
        out << id << ',' << (frames[id].occupied ? 1 : 0);
        for (double v : frames[id].i) {
            std::snprintf(buf, sizeof buf, "%.6g", v);
            out << ',' << buf;
        }
        for (double v : frames[id].q) {
            std::snprintf(buf, sizeof buf, "%.6g", v);
            out << ',' << buf;
        }
        out << "\n";
    }
}

}  // namespace specgame
