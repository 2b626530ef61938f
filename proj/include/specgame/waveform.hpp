#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "specgame/rng.hpp"

namespace specgame {

struct ChannelParams {
    double rayleigh_scale = 1.0;   // Rayleigh fading parameter
    double snr_db = 3.0;           // average signal-to-noise ratio of occupied frames
    int samples_per_frame = 16;    // complex samples per sensing frame

    void validate() const;  // throws std::invalid_argument
};

struct OccupancyProcess {
    double p_occupied = 0.5;  // probability the background transmitter is active

    void validate() const;
};

// One sensing snapshot: row 0 holds the in-phase samples, row 1 the quadrature
// samples. `occupied` is the ground-truth channel state the frame was drawn
// under, not a prediction.
struct IqFrame {
    std::vector<double> i;
    std::vector<double> q;
    bool occupied = false;
};

// Draws one frame. Idle frames are complex white Gaussian noise with unit
// power per complex sample (variance 1/2 per I/Q component). Occupied frames
// add unit-energy QPSK symbols, each scaled by its own Rayleigh fading gain
// and by a fixed amplitude chosen so that the average signal power over the
// fading distribution meets snr_db against the unit noise floor.
IqFrame gen_frame(bool occupied, const ChannelParams& ch, RngSeed seed);

// n frames with occupancy drawn i.i.d. from `occ`. The occupancy draws use
// stream_index itself and frame k uses stream_index + 1 + k, so a dataset
// consumes stream indices [stream_index, stream_index + n]. Callers that
// generate several datasets under one master seed must space their stream
// indices accordingly.
std::vector<IqFrame> gen_dataset(int n, const OccupancyProcess& occ,
                                 const ChannelParams& ch, RngSeed seed);

// Seed-driven shuffle, then the first round(train_fraction * n) frames form
// the training set and the rest the test set.
std::pair<std::vector<IqFrame>, std::vector<IqFrame>> split_dataset(
    const std::vector<IqFrame>& data, double train_fraction, RngSeed seed);

// Optional dump: frame_id,occupied,i_0..i_{S-1},q_0..q_{S-1}.
void dump_frames_csv(const std::vector<IqFrame>& frames, const std::string& path);

}  // namespace specgame
