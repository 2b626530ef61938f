#include "specgame/level_game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace specgame {

namespace {

struct Tables {
    PiecewiseLinear u_att, u_noatt, r_j;
};

Tables build_tables(const LevelGameSpec& spec) {
    const DefenseCurves& c = spec.curves;
    Tables t{
        PiecewiseLinear(c.d, spec.reward_kind == RewardKind::throughput ? c.u_att_tpt
                                                                        : c.u_att_sr),
        PiecewiseLinear(c.d, spec.reward_kind == RewardKind::throughput ? c.u_noatt_tpt
                                                                        : c.u_noatt_sr),
        PiecewiseLinear(c.d, c.r_j)};
    if (spec.smooth) {
        t.u_att.smooth3();
        t.u_noatt.smooth3();
        t.r_j.smooth3();
    }
    return t;
}

double attack_cost_at(const Tables& t, const LevelGameSpec& spec, double d) {
    return t.u_att(d) + spec.c_A1 + spec.c_A2 * t.r_j(d);
}

}  // namespace

void LevelGameSpec::validate() const {
    curves.validate();
    if (curves.d.size() < 2)
        throw std::invalid_argument("level game: need at least two grid points");
    if (c_A1 < 0.0 || c_A2 < 0.0)
        throw std::invalid_argument("level game: costs must be >= 0");
    if (!(stationarity_tol > 0.0) || !(deviation_tol > 0.0))
        throw std::invalid_argument("level game: tolerances must be > 0");
}

double utility_defender_level(const LevelGameSpec& spec, double d, double p_A) {
    spec.validate();
    if (!(p_A >= 0.0 && p_A <= 1.0))
        throw std::invalid_argument("utility_defender_level: p_A outside [0,1]");
    Tables t = build_tables(spec);
    return p_A * t.u_att(d) + (1.0 - p_A) * t.u_noatt(d);
}

double utility_adversary_level(const LevelGameSpec& spec, double d, double p_A) {
    spec.validate();
    if (!(p_A >= 0.0 && p_A <= 1.0))
        throw std::invalid_argument("utility_adversary_level: p_A outside [0,1]");
    Tables t = build_tables(spec);
    return p_A * -attack_cost_at(t, spec, d) + (1.0 - p_A) * -t.u_noatt(d);
}

AdversaryCostCurves adversary_cost_curves(const LevelGameSpec& spec) {
    spec.validate();
    Tables t = build_tables(spec);
    std::vector<double> att(t.u_att.values());
    const std::vector<double>& rj = t.r_j.values();
    for (std::size_t k = 0; k < att.size(); ++k) att[k] += spec.c_A1 + spec.c_A2 * rj[k];
    return {PiecewiseLinear(t.u_att.knots(), att), t.u_noatt};
}

LevelGameResult solve_level_equilibrium(const LevelGameSpec& spec) {
    spec.validate();
    Tables t = build_tables(spec);
    const std::vector<double>& grid = t.u_att.knots();
    const double d_lo = grid.front(), d_hi = grid.back();
    LevelGameResult out;
    std::ostringstream diag;

    struct Candidate {
        double d, p_A;
        bool from_crossing;
    };
    std::vector<Candidate> candidates;

    // Interior branch: d* where the adversary is indifferent (the costs of
    // attack and no-attack cross), p_A* from the defender's stationarity.
    std::vector<double> diff(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        diff[k] = attack_cost_at(t, spec, grid[k]) - t.u_noatt(grid[k]);
    std::vector<double> roots;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double a = diff[k], b = diff[k + 1];
        if (a == 0.0) roots.push_back(grid[k]);
        if (a * b < 0.0)
            roots.push_back(grid[k] + (grid[k + 1] - grid[k]) * (-a / (b - a)));
    }
    if (!diff.empty() && diff.back() == 0.0) roots.push_back(grid.back());
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                roots.end());

    for (double d_star : roots) {
        double g_att = t.u_att.derivative(d_star);
        double g_noatt = t.u_noatt.derivative(d_star);
        double den = g_noatt - g_att;
        if (std::abs(den) < 1e-12) {
            diag << "crossing at d=" << d_star << " has equal reward gradients; skipped. ";
            continue;
        }
        double p_A = g_noatt / den;
        if (p_A < -1e-9 || p_A > 1.0 + 1e-9) {
            diag << "crossing at d=" << d_star << " needs p_A=" << p_A
                 << " outside [0,1]; skipped. ";
            continue;
        }
        candidates.push_back({d_star, std::clamp(p_A, 0.0, 1.0), true});
    }

    // Boundary branch: pure adversary actions with the defender's best level
    // (piecewise-linear utilities attain their maxima at knots), plus the
    // hull-corner profiles demanded by the KKT enumeration.
    std::size_t arg_noatt = 0, arg_att = 0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (t.u_noatt.values()[k] > t.u_noatt.values()[arg_noatt]) arg_noatt = k;
        if (t.u_att.values()[k] > t.u_att.values()[arg_att]) arg_att = k;
    }
    candidates.push_back({grid[arg_noatt], 0.0, false});
    candidates.push_back({grid[arg_att], 1.0, false});
    for (double d : {d_lo, d_hi})
        for (double p : {0.0, 1.0}) candidates.push_back({d, p, false});

    std::vector<LevelGameSolution> verified, rejected;
    for (const Candidate& c : candidates) {
        LevelGameSolution s;
        s.d_star = c.d;
        s.p_A_star = c.p_A;
        bool d_interior = c.d > d_lo + 1e-12 && c.d < d_hi - 1e-12;
        bool p_interior = c.p_A > 1e-12 && c.p_A < 1.0 - 1e-12;
        s.kind = d_interior && p_interior ? LevelSolKind::interior : LevelSolKind::boundary;
        s.u_defender = c.p_A * t.u_att(c.d) + (1.0 - c.p_A) * t.u_noatt(c.d);
        s.u_adversary =
            c.p_A * -attack_cost_at(t, spec, c.d) + (1.0 - c.p_A) * -t.u_noatt(c.d);

        // Adversary side: utility slope in p_A and the matching multipliers.
        double slope_a = t.u_noatt(c.d) - attack_cost_at(t, spec, c.d);
        s.residual_adversary = std::abs(slope_a);
        bool ok = true;
        if (c.p_A <= 1e-12) {
            s.mu.a1 = std::max(-slope_a, 0.0);
            ok = slope_a <= spec.deviation_tol;
        } else if (c.p_A >= 1.0 - 1e-12) {
            s.mu.a2 = std::max(slope_a, 0.0);
            ok = -slope_a <= spec.deviation_tol;
        } else {
            ok = std::abs(slope_a) <= spec.stationarity_tol;
        }
        if (!ok) {
            diag << "candidate (d=" << c.d << ", p_A=" << c.p_A
                 << ") fails adversary optimality. ";
            rejected.push_back(s);
            continue;
        }

        // Defender side: gradient stationarity/multipliers, then the exact
        // knot-wise deviation check (exact because the utility is piecewise
        // linear in d for fixed p_A).
        double g_att = t.u_att.derivative(c.d);
        double g_noatt = t.u_noatt.derivative(c.d);
        double slope_d = c.p_A * (g_att - g_noatt) + g_noatt;
        s.residual_defender = std::abs(slope_d);
        if (c.d <= d_lo + 1e-12) {
            s.mu.d1 = std::max(-slope_d, 0.0);
        } else if (c.d >= d_hi - 1e-12) {
            s.mu.d2 = std::max(slope_d, 0.0);
        } else if (c.from_crossing && s.residual_defender > spec.stationarity_tol) {
            diag << "crossing at d=" << c.d << " violates defender stationarity (residual "
                 << s.residual_defender << "). ";
            rejected.push_back(s);
            continue;
        }
        double best_dev = 0.0;
        for (double dg : grid) {
            double u = c.p_A * t.u_att(dg) + (1.0 - c.p_A) * t.u_noatt(dg);
            best_dev = std::max(best_dev, u - s.u_defender);
        }
        if (best_dev > spec.deviation_tol) {
            diag << "candidate (d=" << c.d << ", p_A=" << c.p_A
                 << ") beaten by defender deviation (+" << best_dev << "). ";
            rejected.push_back(s);
            continue;
        }
        s.verified = true;
        bool dup = false;
        for (const auto& v : verified)
            if (std::abs(v.d_star - s.d_star) < 1e-9 && std::abs(v.p_A_star - s.p_A_star) < 1e-9)
                dup = true;
        if (!dup) verified.push_back(s);
    }

    std::stable_sort(verified.begin(), verified.end(),
                     [](const LevelGameSolution& a, const LevelGameSolution& b) {
                         if (a.kind != b.kind) return a.kind == LevelSolKind::interior;
                         return a.u_defender > b.u_defender;
                     });
    int n_interior = 0;
    for (const auto& v : verified)
        if (v.kind == LevelSolKind::interior) ++n_interior;
    out.multiple_interior = n_interior > 1;
    if (!verified.empty()) {
        out.solutions = std::move(verified);
    } else {
        // Nothing verified: surface the least-violating boundary candidate so
        // callers still get a usable point plus the reasons.
        diag << "no candidate verified; returning best boundary candidate unverified. ";
        std::stable_sort(rejected.begin(), rejected.end(),
                         [](const LevelGameSolution& a, const LevelGameSolution& b) {
                             return a.u_defender > b.u_defender;
                         });
        if (rejected.empty()) throw std::runtime_error("level game: no candidates at all");
        out.solutions.push_back(rejected.front());
    }
    out.diagnostics = diag.str();
    return out;
}

std::vector<CostSweepRow> sweep_cost(const LevelGameSpec& spec_template,
                                     const std::vector<double>& c_a1_grid) {
    if (c_a1_grid.empty()) throw std::invalid_argument("sweep_cost: empty grid");
    for (std::size_t k = 0; k < c_a1_grid.size(); ++k) {
        if (c_a1_grid[k] < 0.0) throw std::invalid_argument("sweep_cost: negative cost");
        if (k > 0 && !(c_a1_grid[k] > c_a1_grid[k - 1]))
            throw std::invalid_argument("sweep_cost: grid not increasing");
    }
    LevelGameSpec spec = spec_template;
    spec.validate();
    Tables t = build_tables(spec);
    const double u_att0 = t.u_att(t.u_att.x_min());
    const double u_noatt0 = t.u_noatt(t.u_noatt.x_min());

    std::vector<CostSweepRow> rows;
    rows.reserve(c_a1_grid.size());
    for (double c1 : c_a1_grid) {
        spec.c_A1 = c1;
        LevelGameResult res = solve_level_equilibrium(spec);
        const LevelGameSolution& s = res.primary();
        CostSweepRow row;
        row.c_a1 = c1;
        row.d_star = s.d_star;
        row.p_a_star = s.p_A_star;
        row.kind = s.kind;
        row.u_def = s.u_defender;
        row.u_adv = s.u_adversary;
        row.gain_vs_attack_nodef =
            u_att0 != 0.0 ? (s.u_defender - u_att0) / u_att0
                          : std::numeric_limits<double>::quiet_NaN();
        row.loss_vs_noattack_nodef =
            u_noatt0 != 0.0 ? (u_noatt0 - s.u_defender) / u_noatt0
                            : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
    }
    return rows;
}

void save_cost_sweep(const std::vector<CostSweepRow>& rows, const std::string& path,
                     const std::vector<std::string>& comment_lines) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& c : comment_lines) out << "# " << c << "\n";
    out << "c_a1,d_star,p_a_star,kind,u_def,u_adv,gain_vs_attack_nodef,"
           "loss_vs_noattack_nodef\n";
    char buf[32];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.6g", v);
        out << buf << sep;
    };
    for (const CostSweepRow& r : rows) {
        put(r.c_a1, ',');
        put(r.d_star, ',');
        put(r.p_a_star, ',');
        out << (r.kind == LevelSolKind::interior ? "interior" : "boundary") << ',';
        put(r.u_def, ',');
        put(r.u_adv, ',');
        put(r.gain_vs_attack_nodef, ',');
        put(r.loss_vs_noattack_nodef, '\n');
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace specgame
