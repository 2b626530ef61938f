#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specgame/classifier.hpp"
#include "specgame/waveform.hpp"

namespace specgame {

// One defender/adversary episode. The defender and the adversary observe the
// same background occupancy process over independent fading channels. With
// attack_on, phase 1 (n_observe instances) is the adversary's observation
// window: it records its own received frame together with the ACK-observable
// outcome and trains the surrogate on those pairs. Phase 2 (n_eval instances)
// is the measured engagement; all reported metrics come from phase 2 only.
struct EngagementConfig {
    OccupancyProcess occ{0.5};
    ChannelParams ch_defender{1.0, 3.0, 16};
    ChannelParams ch_adversary{1.0, 3.0, 16};
    double p_success = 0.95;   // success probability of an unjammed, collision-free transmission
    double defense_level = 0;  // fraction d of decisions flipped, highest confidence first
    bool attack_on = false;
    int n_observe = 1000;
    int n_eval = 10000;
    TrainConfig surrogate_train;  // seed fields are overridden by the episode's stream layout

    std::uint64_t master_seed = 0;
    // Episodes carve their streams out of [stream_base, stream_base + 2^40).
    // Within an episode, role r (occupancy, defender frames, adversary frames,
    // success draws, surrogate training; separately per phase) draws from
    // stream_base + r * 2^32 + instance_index, so everything an episode does
    // is replayable from (master_seed, stream_base) alone.
    std::uint64_t stream_base = 1ull << 48;

    void validate() const;
};

enum class Outcome { no_transmission, success, fail };

struct DecisionRecord {
    bool occupied = false;        // ground truth for the instance
    int prediction = 0;           // defender's raw prediction (0 idle, 1 occupied)
    double confidence = 0.0;
    bool transmitted = false;     // post-flip decision was 'idle'
    std::optional<bool> jammed;   // absent when attack_on is false
    Outcome outcome = Outcome::no_transmission;
};

struct EngagementMetrics {
    double throughput = 0.0;     // successes / n_eval
    double success_ratio = 0.0;  // successes / transmissions (0 when nothing was sent)
    std::optional<double> adversary_accuracy;  // a_J, absent without attack
    double jam_ratio = 0.0;                    // r_J, 0 without attack
    bool surrogate_fallback = false;  // adversary saw one outcome class and never jams
};

// Tabulated sweep results over the defense grid: the jamming-behavior and
// reward curves the game solvers consume.
struct DefenseCurves {
    std::vector<double> d;
    std::vector<double> u_att_tpt, u_noatt_tpt;
    std::vector<double> u_att_sr, u_noatt_sr;
    std::vector<double> a_j, r_j;

    void validate() const;  // sizes match, d strictly increasing, values in [0,1]
};

// Flips the round(d*n) highest-confidence decisions to the opposite label;
// ties broken toward the lowest index. Decisions are (label, confidence).
std::vector<int> apply_defense(const std::vector<Prediction>& decisions, double d);

std::pair<EngagementMetrics, std::vector<DecisionRecord>> run_episode(
    const EngagementConfig& cfg, const ClassifierModel& defender);

// replications independent episodes per (d, attack on/off); metrics averaged.
// Episodes are independent and run on `workers` threads; the reduction is in
// fixed grid order, so results do not depend on scheduling.
DefenseCurves sweep_defense(const EngagementConfig& cfg_template,
                            const std::vector<double>& d_grid,
                            const ClassifierModel& defender, int replications,
                            int workers = 1);

// CSV with schema d,u_att_tpt,u_noatt_tpt,u_att_sr,u_noatt_sr,a_j,r_j.
// comment_lines are written first, each prefixed with "# "; the loader skips
// such lines. Malformed files raise std::runtime_error naming the line.
void save_curves(const DefenseCurves& curves, const std::string& path,
                 const std::vector<std::string>& comment_lines = {});
DefenseCurves load_curves(const std::string& path);

}  // namespace specgame
