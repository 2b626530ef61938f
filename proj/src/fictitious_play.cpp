#include "specgame/fictitious_play.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace specgame {

std::string to_string(TieBreak t) {
    switch (t) {
        case TieBreak::stay: return "stay";
        case TieBreak::zero: return "zero";
        case TieBreak::one: return "one";
        default: return "interval-midpoint";
    }
}

TieBreak tie_break_from_string(const std::string& s) {
    if (s == "stay") return TieBreak::stay;
    if (s == "zero") return TieBreak::zero;
    if (s == "one") return TieBreak::one;
    if (s == "interval-midpoint") return TieBreak::interval_midpoint;
    throw std::invalid_argument("unknown tie_break '" + s + "'");
}

std::string to_string(FpMode m) {
    return m == FpMode::strategy_average ? "strategy-average" : "sampled-action-average";
}

FpMode fp_mode_from_string(const std::string& s) {
    if (s == "strategy-average") return FpMode::strategy_average;
    if (s == "sampled-action-average") return FpMode::sampled_action_average;
    throw std::invalid_argument("unknown fp mode '" + s + "'");
}

void FpConfig::validate() const {
    if (rounds < 1) throw std::invalid_argument("fp: rounds must be >= 1");
    if (!(init_belief_D >= 0.0 && init_belief_D <= 1.0) ||
        !(init_belief_A >= 0.0 && init_belief_A <= 1.0))
        throw std::invalid_argument("fp: initial beliefs must be in [0,1]");
    if (!(tie_eps >= 0.0)) throw std::invalid_argument("fp: tie_eps must be >= 0");
}

namespace {

// At indifference the whole interval is optimal; the tie break picks the
// played point. 'stay' repeats the previous play, and in round 1 (no previous
// play) it falls back to the player's own initial belief, which is what makes
// a run started exactly at an equilibrium reproduce it from the first round.
double resolve(const BrSet& br, TieBreak tb, bool first_round, double prev_play,
               double own_init) {
    if (!br.is_interval()) return br.lo;
    switch (tb) {
        case TieBreak::stay: return first_round ? own_init : prev_play;
        case TieBreak::zero: return 0.0;
        case TieBreak::one: return 1.0;
        default: return 0.5 * (br.lo + br.hi);
    }
}

}  // namespace

FpTrace run_fp(const MatrixGame& g, const FpConfig& cfg) {
    cfg.validate();
    FpTrace tr;
    tr.belief_pD.reserve(cfg.rounds);
    tr.belief_pA.reserve(cfg.rounds);
    tr.play_pD.reserve(cfg.rounds);
    tr.play_pA.reserve(cfg.rounds);
    tr.u_def.reserve(cfg.rounds);
    tr.u_adv.reserve(cfg.rounds);

    RngStream rng(cfg.seed);
    double avg_D = cfg.init_belief_D;  // what the adversary best-responds to
    double avg_A = cfg.init_belief_A;
    double sum_D = cfg.init_belief_D;  // prior counted with weight 1
    double sum_A = cfg.init_belief_A;
    double prev_D = 0.0, prev_A = 0.0;

    for (int t = 1; t <= cfg.rounds; ++t) {
        BrSet br_D = best_response(g, Player::defender, avg_A, cfg.tie_eps);
        BrSet br_A = best_response(g, Player::adversary, avg_D, cfg.tie_eps);
        double play_D = resolve(br_D, cfg.tie_break, t == 1, prev_D, cfg.init_belief_D);
        double play_A = resolve(br_A, cfg.tie_break, t == 1, prev_A, cfg.init_belief_A);
        if (cfg.mode == FpMode::sampled_action_average) {
            play_D = rng.uniform01() < play_D ? 1.0 : 0.0;
            play_A = rng.uniform01() < play_A ? 1.0 : 0.0;
        }
        prev_D = play_D;
        prev_A = play_A;
        sum_D += play_D;
        sum_A += play_A;
        avg_D = sum_D / static_cast<double>(t + 1);
        avg_A = sum_A / static_cast<double>(t + 1);

        tr.play_pD.push_back(play_D);
        tr.play_pA.push_back(play_A);
        tr.belief_pD.push_back(avg_D);
        tr.belief_pA.push_back(avg_A);
        MixedProfile played{play_D, play_A};
        tr.u_def.push_back(utility_defender(g, played));
        tr.u_adv.push_back(utility_adversary(g, played));
    }
    return tr;
}

std::optional<MixedProfile> convergence_check(const FpTrace& trace, const MatrixGame& g,
                                              int window, double eps) {
    const auto n = static_cast<long>(trace.rounds());
    if (window < 1 || window > n)
        throw std::invalid_argument("convergence_check: window must be in [1, rounds]");
    MixedProfile final_avg{trace.belief_pD.back(), trace.belief_pA.back()};
    for (long t = n - window; t < n; ++t) {
        if (std::abs(trace.belief_pD[t] - final_avg.p_D) >= eps) return std::nullopt;
        if (std::abs(trace.belief_pA[t] - final_avg.p_A) >= eps) return std::nullopt;
    }
    double gain = 0.0;
    double ud = utility_defender(g, final_avg);
    double ua = utility_adversary(g, final_avg);
    for (double p : {0.0, 1.0}) {
        gain = std::max(gain, utility_defender(g, {p, final_avg.p_A}) - ud);
        gain = std::max(gain, utility_adversary(g, {final_avg.p_D, p}) - ua);
    }
    if (gain > eps) return std::nullopt;
    return final_avg;
}

void save_trace(const FpTrace& trace, const std::string& path,
                const std::vector<std::string>& comment_lines) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& c : comment_lines) out << "# " << c << "\n";
    out << "t,belief_pD,belief_pA,play_pD,play_pA,u_def,u_adv\n";
    char buf[32];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.6g", v);
        out << buf << sep;
    };
    for (std::size_t t = 0; t < trace.rounds(); ++t) {
        out << (t + 1) << ',';
        put(trace.belief_pD[t], ',');
        put(trace.belief_pA[t], ',');
        put(trace.play_pD[t], ',');
        put(trace.play_pA[t], ',');
        put(trace.u_def[t], ',');
        put(trace.u_adv[t], '\n');
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace specgame
