#pragma once
#include <optional>
#include <string>
#include <vector>

#include "specgame/engagement.hpp"

namespace specgame {

enum class RewardKind { throughput, success_ratio };

std::string to_string(RewardKind k);
RewardKind reward_kind_from_string(const std::string& s);

// 2x2 attack/defense game. Entries are defender utilities u^(D)_{S_D|S_A};
// the adversary's utility is the negated defender utility minus the attack
// cost c_A charged on the attack action.
struct MatrixGame {
    double u_D_A = 0.0;    // defend, attacked
    double u_D_nA = 0.0;   // defend, not attacked
    double u_nD_A = 0.0;   // no defense, attacked
    double u_nD_nA = 0.0;  // no defense, not attacked
    double c_A = 0.0;
    RewardKind reward_kind = RewardKind::throughput;
};

struct MixedProfile {
    double p_D = 0.0;  // probability of playing 'defense'
    double p_A = 0.0;  // probability of playing 'attack'
};

enum class EqKind { pure, mixed_interior, boundary };

struct KktMultipliers {
    // mu_{i,1} pairs with p_i >= 0 and mu_{i,2} with p_i <= 1.
    double d1 = 0.0, d2 = 0.0, a1 = 0.0, a2 = 0.0;
};

struct EquilibriumCertificate {
    MixedProfile profile;
    EqKind kind = EqKind::pure;
    KktMultipliers mu;
    double max_deviation_gain = 0.0;  // best unilateral improvement, both players
    double u_defender = 0.0;
    double u_adversary = 0.0;
};

enum class Player { defender, adversary };

// Best-response set in the player's own probability. Linearity makes it
// either a single endpoint or, at indifference, the whole interval [0,1].
struct BrSet {
    double lo = 0.0, hi = 0.0;
    bool is_interval() const { return lo != hi; }
};

// Builds the game from tabulated curves: the 'defense' action commits to
// level d, 'no defense' to level 0. d must lie within the grid hull and the
// hull must contain 0.
MatrixGame from_curves(const DefenseCurves& curves, double d, RewardKind kind, double c_A);

double utility_defender(const MatrixGame& g, const MixedProfile& s);
double utility_adversary(const MatrixGame& g, const MixedProfile& s);

// eps is the absolute slope threshold treated as indifference; it exists
// because profiles computed in floating point sit within rounding error of
// exact indifference, never exactly on it.
BrSet best_response(const MatrixGame& g, Player player, double opponent_prob,
                    double eps = 1e-9);

struct NashResult {
    std::vector<EquilibriumCertificate> equilibria;  // sorted by defender utility, descending
    bool degenerate = false;  // some indifference held identically; continua possible
};

// Enumerates the four pure profiles plus the interior candidate from the two
// indifference conditions. Every returned certificate is verified: unilateral
// deviation to either endpoint (sufficient by linearity) gains at most tol.
NashResult nash_equilibria(const MatrixGame& g, double tol = 1e-9);

// Relative gain/loss of the equilibrium defender utility against the four
// fixed regimes, (u_eq - u_fixed) / u_fixed; absent where u_fixed == 0.
struct GainLossReport {
    std::optional<double> vs_defense_attack;      // fixed (D, A)
    std::optional<double> vs_nodefense_attack;    // fixed (nD, A)
    std::optional<double> vs_defense_noattack;    // fixed (D, nA)
    std::optional<double> vs_nodefense_noattack;  // fixed (nD, nA)
};

GainLossReport gain_loss_report(const MatrixGame& g, const EquilibriumCertificate& eq);

}  // namespace specgame
