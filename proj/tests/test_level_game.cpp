#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "specgame/interp.hpp"
#include "specgame/level_game.hpp"

using namespace specgame;

TEST_SUITE_BEGIN("level_game");

namespace {

// Analytic curve family used as the solver oracle. Throughput slots hold
//   u_att = 1.2 d (1 - d),  u_noatt = 0.5 - 0.2 d
// whose cost crossing (c1=0.05, c2=0.1, r_J = 1-d) is d* = 1/2 with p_A* = 1;
// success-ratio slots hold the steeper  u_noatt = 0.5 - 0.45 d  variant with
// the interior equilibrium d* = 7/24, p_A* = 9/19 (hand-derived quadratic
// roots, cross-checked by brute force). att_offset shifts both attack curves
// up to keep the d = 0 baselines nonzero where a test needs finite ratios.
DefenseCurves quadratic_curves(double step, double att_offset = 0.0) {
    DefenseCurves c;
    for (double d = 0.0; d <= 1.0 + 1e-12; d += step) {
        double x = std::min(d, 1.0);
        c.d.push_back(x);
        c.u_att_tpt.push_back(att_offset + 1.2 * x * (1.0 - x));
        c.u_noatt_tpt.push_back(0.5 - 0.2 * x);
        c.u_att_sr.push_back(att_offset + 1.2 * x * (1.0 - x));
        c.u_noatt_sr.push_back(0.5 - 0.45 * x);
        c.a_j.push_back(0.8);
        c.r_j.push_back(1.0 - x);
        if (x == 1.0) break;
    }
    return c;
}

LevelGameSpec quadratic_spec(RewardKind kind, double step = 1e-3, double att_offset = 0.0) {
    LevelGameSpec spec;
    spec.curves = quadratic_curves(step, att_offset);
    spec.reward_kind = kind;
    spec.c_A1 = 0.05;
    spec.c_A2 = 0.1;
    return spec;
}

}  // namespace

TEST_CASE("piecewise linear interpolation basics") {
    PiecewiseLinear pl({0.0, 1.0, 3.0}, {1.0, 3.0, -1.0});
    CHECK(pl(0.0) == doctest::Approx(1.0));
    CHECK(pl(0.5) == doctest::Approx(2.0));
    CHECK(pl(1.0) == doctest::Approx(3.0));
    CHECK(pl(2.0) == doctest::Approx(1.0));
    CHECK(pl(3.0) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(pl(3.5), std::out_of_range);
    CHECK_THROWS_AS(pl(-0.5), std::out_of_range);
    CHECK(pl.derivative(0.4, 0.1) == doctest::Approx(2.0));
    CHECK(pl.derivative(2.5, 0.1) == doctest::Approx(-2.0));
    CHECK(pl.derivative(0.0, 0.25) == doctest::Approx(2.0));  // one-sided at the edge
    CHECK_THROWS_AS(PiecewiseLinear({0.0, 0.0, 1.0}, {0.0, 1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("window-3 smoothing averages interior knots") {
    PiecewiseLinear pl({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 4.0, 9.0});
    pl.smooth3();
    CHECK(pl(0.0) == doctest::Approx(0.5));        // window-2 end
    CHECK(pl(1.0) == doctest::Approx(5.0 / 3.0));  // (0+1+4)/3
    CHECK(pl(2.0) == doctest::Approx(14.0 / 3.0));
    CHECK(pl(3.0) == doctest::Approx(6.5));
}

TEST_CASE("adversary cost curves follow the definition") {
    LevelGameSpec spec = quadratic_spec(RewardKind::throughput, 0.05);
    AdversaryCostCurves cc = adversary_cost_curves(spec);
    for (double d : {0.0, 0.15, 0.5, 1.0}) {
        double u_att = 1.2 * d * (1 - d);
        CHECK(cc.attack_cost(d) ==
              doctest::Approx(u_att + 0.05 + 0.1 * (1 - d)).epsilon(1e-9));
        CHECK(cc.noattack_cost(d) == doctest::Approx(0.5 - 0.2 * d).epsilon(1e-9));
    }
}

TEST_CASE("level utilities and the zero-sum-minus-cost identity") {
    LevelGameSpec spec = quadratic_spec(RewardKind::throughput, 0.01);
    for (double d : {0.1, 0.45, 0.9})
        for (double p : {0.0, 0.3, 1.0}) {
            double u_att = 1.2 * d * (1 - d), u_no = 0.5 - 0.2 * d;
            double u_def = p * u_att + (1 - p) * u_no;
            CHECK(utility_defender_level(spec, d, p) == doctest::Approx(u_def).epsilon(1e-9));
            CHECK(utility_adversary_level(spec, d, p) ==
                  doctest::Approx(-u_def - p * (0.05 + 0.1 * (1 - d))).epsilon(1e-9));
        }
}

TEST_CASE("quadratic curve set: equilibrium at the cost crossing") {
    LevelGameResult res = solve_level_equilibrium(quadratic_spec(RewardKind::throughput));
    REQUIRE(res.solutions.size() == 1);
    const auto& s = res.primary();
    CHECK(s.verified);
    // p_A* = 1 sits on the adversary's bound, so the profile is classified as
    // a boundary solution even though d* is interior.
    CHECK(s.kind == LevelSolKind::boundary);
    CHECK(std::abs(s.d_star - 0.5) < 1e-4);
    CHECK(std::abs(s.p_A_star - 1.0) < 1e-3);
    CHECK(s.u_defender == doctest::Approx(0.3).epsilon(1e-3));
    CHECK(s.residual_adversary < 1e-6);
    // The second cost crossing at d = 7/12 has equal utility gradients on both
    // branches, so no adversary mix can make the defender stationary there.
    CHECK(!res.multiple_interior);
    CHECK(res.diagnostics.find("d=0.583") != std::string::npos);
}

TEST_CASE("steeper no-attack curve moves the equilibrium to 7/24") {
    LevelGameResult res = solve_level_equilibrium(quadratic_spec(RewardKind::success_ratio));
    REQUIRE(!res.solutions.empty());
    const auto& s = res.primary();
    CHECK(s.verified);
    CHECK(s.kind == LevelSolKind::interior);
    CHECK(std::abs(s.d_star - 7.0 / 24.0) < 1e-4);
    CHECK(std::abs(s.p_A_star - 9.0 / 19.0) < 1e-3);
}

TEST_CASE("grid refinement does not move the root") {
    auto coarse = solve_level_equilibrium(quadratic_spec(RewardKind::success_ratio, 1e-3));
    auto fine = solve_level_equilibrium(quadratic_spec(RewardKind::success_ratio, 5e-4));
    REQUIRE(!coarse.solutions.empty());
    REQUIRE(!fine.solutions.empty());
    CHECK(std::abs(coarse.primary().d_star - fine.primary().d_star) < 1e-5);
    CHECK(std::abs(coarse.primary().p_A_star - fine.primary().p_A_star) < 1e-4);
}

TEST_CASE("prohibitive flat cost drives the game to the no-defense corner") {
    LevelGameSpec spec = quadratic_spec(RewardKind::throughput);
    spec.c_A1 = 1.0;  // attack cost exceeds any conceivable reward
    LevelGameResult res = solve_level_equilibrium(spec);
    REQUIRE(!res.solutions.empty());
    const auto& s = res.primary();
    CHECK(s.verified);
    CHECK(s.kind == LevelSolKind::boundary);
    CHECK(s.d_star == doctest::Approx(0.0));
    CHECK(s.p_A_star == doctest::Approx(0.0));
    CHECK(s.u_defender == doctest::Approx(0.5));
}

TEST_CASE("cost sweep is monotone on the analytic family") {
    // With the attack curve shifted up by 0.1 the crossing satisfies
    // 1.2 d^2 - 1.55 d + (0.3 - c1) = 0; its lower root falls as c1 grows and
    // p_A* = 0.45 / (0.45 + 1.2 (1 - 2 d*)) falls with it.
    LevelGameSpec spec = quadratic_spec(RewardKind::success_ratio, 1e-3, 0.1);
    std::vector<double> grid{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    auto rows = sweep_cost(spec, grid);
    REQUIRE(rows.size() == grid.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].c_a1 == doctest::Approx(grid[k]));
        if (k > 0) {
            CHECK(rows[k].d_star <= rows[k - 1].d_star + 1e-9);
            CHECK(rows[k].p_a_star <= rows[k - 1].p_a_star + 1e-9);
        }
        double expect = (1.55 - std::sqrt(1.55 * 1.55 - 4.8 * (0.3 - grid[k]))) / 2.4;
        CHECK(std::abs(rows[k].d_star - expect) < 1e-4);
        // Relative gains are well defined here because u_att(0) = 0.1 > 0.
        CHECK(std::isfinite(rows[k].gain_vs_attack_nodef));
        CHECK(std::isfinite(rows[k].loss_vs_noattack_nodef));
        CHECK(rows[k].u_def == doctest::Approx(0.1 * rows[k].gain_vs_attack_nodef + 0.1)
                                   .epsilon(1e-9));
        CHECK(rows[k].u_def ==
              doctest::Approx(0.5 * (1.0 - rows[k].loss_vs_noattack_nodef)).epsilon(1e-9));
    }
}

TEST_CASE("cost sweep CSV schema") {
    LevelGameSpec spec = quadratic_spec(RewardKind::throughput, 0.01);
    auto rows = sweep_cost(spec, {0.0, 0.1});
    std::string path = "cost_sweep_test.csv";
    save_cost_sweep(rows, path, {"hash 123"});
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# hash 123");
    std::getline(in, line);
    CHECK(line ==
          "c_a1,d_star,p_a_star,kind,u_def,u_adv,gain_vs_attack_nodef,"
          "loss_vs_noattack_nodef");
    int rows_n = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows_n;
    CHECK(rows_n == 2);
    std::remove(path.c_str());
}

TEST_CASE("spec validation rejects broken inputs") {
    LevelGameSpec spec = quadratic_spec(RewardKind::throughput, 0.25);
    spec.c_A1 = -0.1;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = quadratic_spec(RewardKind::throughput, 0.25);
    spec.curves.r_j.pop_back();
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_SUITE_END();
