#include "specgame/matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specgame/interp.hpp"

namespace specgame {

std::string to_string(RewardKind k) {
    return k == RewardKind::throughput ? "throughput" : "success_ratio";
}

RewardKind reward_kind_from_string(const std::string& s) {
    if (s == "throughput") return RewardKind::throughput;
    if (s == "success_ratio") return RewardKind::success_ratio;
    throw std::invalid_argument("unknown reward kind '" + s +
                                "' (expected throughput or success_ratio)");
}

MatrixGame from_curves(const DefenseCurves& curves, double d, RewardKind kind, double c_A) {
    curves.validate();
    if (curves.d.size() < 2)
        throw std::invalid_argument("from_curves: need at least two grid points");
    if (c_A < 0.0) throw std::invalid_argument("from_curves: c_A must be >= 0");
    PiecewiseLinear u_att(curves.d,
                          kind == RewardKind::throughput ? curves.u_att_tpt : curves.u_att_sr);
    PiecewiseLinear u_noatt(
        curves.d, kind == RewardKind::throughput ? curves.u_noatt_tpt : curves.u_noatt_sr);
    if (d < u_att.x_min() || d > u_att.x_max())
        throw std::out_of_range("from_curves: d outside the grid hull");
    if (u_att.x_min() > 0.0)
        throw std::out_of_range("from_curves: grid does not contain d = 0");
    MatrixGame g;
    g.u_D_A = u_att(d);
    g.u_D_nA = u_noatt(d);
    g.u_nD_A = u_att(0.0);
    g.u_nD_nA = u_noatt(0.0);
    g.c_A = c_A;
    g.reward_kind = kind;
    return g;
}

double utility_defender(const MatrixGame& g, const MixedProfile& s) {
    return s.p_D * (s.p_A * g.u_D_A + (1.0 - s.p_A) * g.u_D_nA) +
           (1.0 - s.p_D) * (s.p_A * g.u_nD_A + (1.0 - s.p_A) * g.u_nD_nA);
}

double utility_adversary(const MatrixGame& g, const MixedProfile& s) {
    double attacked = s.p_D * -g.u_D_A + (1.0 - s.p_D) * -g.u_nD_A - g.c_A;
    double idle = s.p_D * -g.u_D_nA + (1.0 - s.p_D) * -g.u_nD_nA;
    return s.p_A * attacked + (1.0 - s.p_A) * idle;
}

namespace {

// Derivative of the player's expected utility in its own probability; both
// utilities are bilinear so this fully determines the best response.
double own_slope(const MatrixGame& g, Player player, double opponent_prob) {
    if (player == Player::defender) {
        double q = opponent_prob;  // p_A
        return q * (g.u_D_A - g.u_nD_A) + (1.0 - q) * (g.u_D_nA - g.u_nD_nA);
    }
    double q = opponent_prob;  // p_D
    return q * (g.u_D_nA - g.u_D_A) + (1.0 - q) * (g.u_nD_nA - g.u_nD_A) - g.c_A;
}

double deviation_gain(const MatrixGame& g, const MixedProfile& s) {
    double ud = utility_defender(g, s);
    double ua = utility_adversary(g, s);
    double gain = 0.0;
    for (double p : {0.0, 1.0}) {
        gain = std::max(gain, utility_defender(g, {p, s.p_A}) - ud);
        gain = std::max(gain, utility_adversary(g, {s.p_D, p}) - ua);
    }
    return gain;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12; }

// Stationarity for a maximizer over p in [0,1] reads -slope - mu1 + mu2 = 0
// with complementary slackness, so interior points need slope 0, p = 0 takes
// mu1 = -slope and p = 1 takes mu2 = slope.
bool reconstruct_mu(double p, double slope, double tol, double& mu1, double& mu2) {
    mu1 = mu2 = 0.0;
    if (near(p, 0.0)) {
        mu1 = -slope;
        return mu1 >= -tol;
    }
    if (near(p, 1.0)) {
        mu2 = slope;
        return mu2 >= -tol;
    }
    return std::abs(slope) <= tol;
}

}  // namespace

BrSet best_response(const MatrixGame& g, Player player, double opponent_prob, double eps) {
    if (!(opponent_prob >= 0.0 && opponent_prob <= 1.0))
        throw std::invalid_argument("best_response: opponent_prob outside [0,1]");
    double slope = own_slope(g, player, opponent_prob);
    if (slope > eps) return {1.0, 1.0};
    if (slope < -eps) return {0.0, 0.0};
    return {0.0, 1.0};
}

NashResult nash_equilibria(const MatrixGame& g, double tol) {
    NashResult out;
    std::vector<MixedProfile> candidates = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};

    // Interior candidate from the two indifference conditions (zero-multiplier
    // branch of the KKT system).
    double den = g.u_D_A - g.u_nD_A + g.u_nD_nA - g.u_D_nA;
    if (std::abs(den) > 1e-15) {
        double p_A = (g.u_nD_nA - g.u_D_nA) / den;
        double p_D = (g.u_nD_nA - g.u_nD_A - g.c_A) / den;
        if (p_A >= -1e-12 && p_A <= 1.0 + 1e-12 && p_D >= -1e-12 && p_D <= 1.0 + 1e-12)
            candidates.push_back({std::clamp(p_D, 0.0, 1.0), std::clamp(p_A, 0.0, 1.0)});
    } else {
        out.degenerate = true;
    }

    for (const MixedProfile& s : candidates) {
        double gain = deviation_gain(g, s);
        if (gain > tol) continue;
        EquilibriumCertificate cert;
        cert.profile = s;
        cert.max_deviation_gain = gain;
        double slope_d = own_slope(g, Player::defender, s.p_A);
        double slope_a = own_slope(g, Player::adversary, s.p_D);
        if (!reconstruct_mu(s.p_D, slope_d, tol, cert.mu.d1, cert.mu.d2)) continue;
        if (!reconstruct_mu(s.p_A, slope_a, tol, cert.mu.a1, cert.mu.a2)) continue;
        cert.mu.d1 = std::max(cert.mu.d1, 0.0);
        cert.mu.d2 = std::max(cert.mu.d2, 0.0);
        cert.mu.a1 = std::max(cert.mu.a1, 0.0);
        cert.mu.a2 = std::max(cert.mu.a2, 0.0);
        bool d_pure = near(s.p_D, 0.0) || near(s.p_D, 1.0);
        bool a_pure = near(s.p_A, 0.0) || near(s.p_A, 1.0);
        cert.kind = d_pure && a_pure ? EqKind::pure
                    : (!d_pure && !a_pure) ? EqKind::mixed_interior
                                           : EqKind::boundary;
        cert.u_defender = utility_defender(g, s);
        cert.u_adversary = utility_adversary(g, s);
        // The interior candidate can coincide with a pure profile; drop exact
        // duplicates.
        bool dup = false;
        for (const auto& e : out.equilibria)
            if (near(e.profile.p_D, s.p_D) && near(e.profile.p_A, s.p_A)) dup = true;
        if (!dup) out.equilibria.push_back(cert);
        // An indifference that holds at a pure profile means a continuum of
        // equilibria is possible.
        if ((d_pure && std::abs(slope_d) <= tol) || (a_pure && std::abs(slope_a) <= tol))
            out.degenerate = true;
    }

    std::stable_sort(out.equilibria.begin(), out.equilibria.end(),
                     [](const EquilibriumCertificate& a, const EquilibriumCertificate& b) {
                         return a.u_defender > b.u_defender;
                     });
    return out;
}

GainLossReport gain_loss_report(const MatrixGame& g, const EquilibriumCertificate& eq) {
    double u_eq = utility_defender(g, eq.profile);
    auto ratio = [u_eq](double fixed) -> std::optional<double> {
        if (fixed == 0.0) return std::nullopt;
        return (u_eq - fixed) / fixed;
    };
    GainLossReport r;
    r.vs_defense_attack = ratio(g.u_D_A);
    r.vs_nodefense_attack = ratio(g.u_nD_A);
    r.vs_defense_noattack = ratio(g.u_D_nA);
    r.vs_nodefense_noattack = ratio(g.u_nD_nA);
    return r;
}

}  // namespace specgame
