#pragma once
#include <optional>
#include <string>
#include <vector>

#include "specgame/matrix_game.hpp"
#include "specgame/rng.hpp"

namespace specgame {

enum class TieBreak { stay, zero, one, interval_midpoint };
enum class FpMode { strategy_average, sampled_action_average };

std::string to_string(TieBreak t);
TieBreak tie_break_from_string(const std::string& s);
std::string to_string(FpMode m);
FpMode fp_mode_from_string(const std::string& s);

struct FpConfig {
    int rounds = 2000;
    // Prior averages before round 1, each counted with weight 1.
    double init_belief_D = 0.5;
    double init_belief_A = 0.5;
    TieBreak tie_break = TieBreak::stay;
    FpMode mode = FpMode::strategy_average;
    RngSeed seed;           // used only in sampled-action mode
    double tie_eps = 1e-9;  // slope threshold treated as indifference

    void validate() const;
};

// Per-round record. belief_* hold the running averages after the round's play
// is folded in, so belief(t) = (init + sum of plays through t) / (t + 1);
// round t's play itself best-responds to belief(t-1) (or to the initial
// beliefs for t = 1). In sampled-action mode play_* are the realized 0/1
// actions and utilities are evaluated at those actions.
struct FpTrace {
    std::vector<double> belief_pD, belief_pA;
    std::vector<double> play_pD, play_pA;
    std::vector<double> u_def, u_adv;

    std::size_t rounds() const { return play_pD.size(); }
};

FpTrace run_fp(const MatrixGame& g, const FpConfig& cfg);

// Returns the final average profile when, over the last `window` rounds, both
// players' averages stayed within eps of the final one and that profile's
// unilateral deviation gain in g is at most eps. Otherwise absent.
std::optional<MixedProfile> convergence_check(const FpTrace& trace, const MatrixGame& g,
                                              int window, double eps);

// CSV schema: t,belief_pD,belief_pA,play_pD,play_pA,u_def,u_adv.
void save_trace(const FpTrace& trace, const std::string& path,
                const std::vector<std::string>& comment_lines = {});

}  // namespace specgame
