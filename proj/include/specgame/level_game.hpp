#pragma once
#include <string>
#include <vector>

#include "specgame/engagement.hpp"
#include "specgame/interp.hpp"
#include "specgame/matrix_game.hpp"

namespace specgame {

// Continuous-defense game: the defender picks the level d directly, the
// adversary picks its attack probability. Utilities come from tabulated
// DefenseCurves through piecewise-linear interpolation.
struct LevelGameSpec {
    DefenseCurves curves;
    RewardKind reward_kind = RewardKind::throughput;
    double c_A1 = 0.1;  // fixed cost of building the surrogate
    double c_A2 = 0.1;  // per-jam cost coefficient, multiplies r_J(d)
    bool smooth = false;  // window-3 moving average of the curves before use

    // Interior solutions must satisfy both stationarity conditions to within
    // stationarity_tol. deviation_tol bounds the tolerated unilateral
    // improvement during verification; it stays tight for analytic curves and
    // must be loosened to the Monte Carlo noise floor for measured ones.
    double stationarity_tol = 1e-6;
    double deviation_tol = 1e-6;

    void validate() const;
};

enum class LevelSolKind { interior, boundary };

struct LevelKkt {
    double d1 = 0.0, d2 = 0.0;  // defender's constraints d >= hull min, d <= hull max
    double a1 = 0.0, a2 = 0.0;  // adversary's constraints p_A >= 0, p_A <= 1
};

struct LevelGameSolution {
    double d_star = 0.0;
    double p_A_star = 0.0;
    LevelSolKind kind = LevelSolKind::boundary;
    double u_defender = 0.0;
    double u_adversary = 0.0;
    LevelKkt mu;
    bool verified = false;
    double residual_adversary = 0.0;  // |attack_cost(d*) - noattack_cost(d*)| for mixed p_A
    double residual_defender = 0.0;   // |p_A (grad u_att - grad u_noatt) + grad u_noatt|
};

struct LevelGameResult {
    // Verified solutions first (interior before boundary, then by defender
    // utility); if nothing verified, the defender-preferred rejected candidate
    // is returned with verified = false and the diagnostics explain why.
    std::vector<LevelGameSolution> solutions;
    bool multiple_interior = false;
    std::string diagnostics;

    const LevelGameSolution& primary() const { return solutions.front(); }
};

struct AdversaryCostCurves {
    PiecewiseLinear attack_cost;    // u_attack(d) + c_A1 + c_A2 * r_J(d)
    PiecewiseLinear noattack_cost;  // u_noattack(d)
};

double utility_defender_level(const LevelGameSpec& spec, double d, double p_A);
double utility_adversary_level(const LevelGameSpec& spec, double d, double p_A);

AdversaryCostCurves adversary_cost_curves(const LevelGameSpec& spec);

LevelGameResult solve_level_equilibrium(const LevelGameSpec& spec);

struct CostSweepRow {
    double c_a1 = 0.0;
    double d_star = 0.0;
    double p_a_star = 0.0;
    LevelSolKind kind = LevelSolKind::boundary;
    double u_def = 0.0;
    double u_adv = 0.0;
    double gain_vs_attack_nodef = 0.0;    // (u_def - u_attack(0)) / u_attack(0)
    double loss_vs_noattack_nodef = 0.0;  // (u_noattack(0) - u_def) / u_noattack(0)
};

// Solves for every c_A1 in the grid with c_A2 and everything else fixed.
std::vector<CostSweepRow> sweep_cost(const LevelGameSpec& spec_template,
                                     const std::vector<double>& c_a1_grid);

// CSV schema:
// c_a1,d_star,p_a_star,kind,u_def,u_adv,gain_vs_attack_nodef,loss_vs_noattack_nodef
void save_cost_sweep(const std::vector<CostSweepRow>& rows, const std::string& path,
                     const std::vector<std::string>& comment_lines = {});

}  // namespace specgame
