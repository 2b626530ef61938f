// Command-line front end: train the sensing classifier, sweep the defense
// grid, and solve the resulting games. Every run is replayable from the
// config plus --seed; outputs embed the config hash and seed so results can
// be traced back to their inputs.
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "specgame/engagement.hpp"
#include "specgame/fictitious_play.hpp"
#include "specgame/level_game.hpp"
#include "specgame/matrix_game.hpp"
#include "specgame/run_config.hpp"

using nlohmann::json;
using namespace specgame;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    int workers = 0;  // 0 = hardware concurrency
    bool no_gate = false;
};

RunConfig make_config(const GlobalOpts& g) {
    RunConfig cfg = g.config_path.empty() ? RunConfig{} : load_config(g.config_path);
    if (g.seed_set) cfg.master_seed = g.seed;
    cfg.validate();
    return cfg;
}

std::string hash_hex(const RunConfig& cfg) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, config_hash(cfg));
    return buf;
}

std::vector<std::string> stamp(const RunConfig& cfg) {
    return {"config_hash " + hash_hex(cfg),
            "master_seed " + std::to_string(cfg.master_seed)};
}

int effective_workers(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_json(const json& j, const std::string& out) {
    std::string text = j.dump(2);
    if (out.empty()) {
        std::printf("%s\n", text.c_str());
        return;
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out + " for writing");
    f << text << "\n";
    if (!f) throw std::runtime_error("write failed: " + out);
}

const char* to_cstr(EqKind k) {
    switch (k) {
        case EqKind::pure: return "pure";
        case EqKind::mixed_interior: return "mixed_interior";
        default: return "boundary";
    }
}

json to_json(const GainLossReport& r) {
    auto opt = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };
    return {{"vs_defense_attack", opt(r.vs_defense_attack)},
            {"vs_nodefense_attack", opt(r.vs_nodefense_attack)},
            {"vs_defense_noattack", opt(r.vs_defense_noattack)},
            {"vs_nodefense_noattack", opt(r.vs_nodefense_noattack)}};
}

// Trains (or loads) the defender and applies the sensing-accuracy gate.
// Returns the gate exit code, 0 if training passed.
int obtain_defender(const RunConfig& cfg, const GlobalOpts& g, const std::string& model_path,
                    ClassifierModel* out_model) {
    if (!model_path.empty()) {
        *out_model = load_model(model_path);
        if (out_model->samples != cfg.channel.samples_per_frame)
            throw std::invalid_argument("model frame length " +
                                        std::to_string(out_model->samples) +
                                        " does not match config samples_per_frame");
        return 0;
    }
    DefenderBundle b = train_defender(cfg);
    std::fprintf(stderr, "defender: test accuracy %.4f (train loss %.4f -> %.4f)\n",
                 b.test_accuracy, b.model.initial_train_loss, b.model.final_train_loss);
    *out_model = std::move(b.model);
    if (!g.no_gate && b.test_accuracy < cfg.min_accuracy) {
        std::fprintf(stderr, "gate: accuracy %.4f below required %.4f\n", b.test_accuracy,
                     cfg.min_accuracy);
        return 2;
    }
    return 0;
}

int cmd_train(const GlobalOpts& g, const std::string& dump_frames) {
    RunConfig cfg = make_config(g);
    if (!dump_frames.empty()) {
        auto data = gen_dataset(cfg.n_dataset, cfg.occupancy, cfg.channel, {cfg.master_seed, 0});
        dump_frames_csv(data, dump_frames);
    }
    ClassifierModel model;
    int gate = obtain_defender(cfg, g, "", &model);
    std::string out = g.out.empty() ? "model.txt" : g.out;
    save_model(model, out);  // saved even on gate failure so the run can be inspected
    std::printf("model %s accuracy %.4f\n", out.c_str(), model.train_accuracy);
    return gate;
}

int cmd_curves(const GlobalOpts& g, const std::string& model_path) {
    RunConfig cfg = make_config(g);
    ClassifierModel model;
    if (int gate = obtain_defender(cfg, g, model_path, &model)) return gate;
    DefenseCurves curves = sweep_defense(cfg.engagement(0.0, false), cfg.grid(), model,
                                         cfg.replications, effective_workers(g.workers));
    std::string out = g.out.empty() ? "curves.csv" : g.out;
    save_curves(curves, out, stamp(cfg));
    std::printf("curves %s (%zu levels, %d replications)\n", out.c_str(), curves.d.size(),
                cfg.replications);
    return 0;
}

int cmd_nash(const GlobalOpts& g, const std::string& curves_path, double defense,
             const std::string& reward) {
    RunConfig cfg = make_config(g);
    RewardKind kind = reward.empty() ? cfg.reward_kind : reward_kind_from_string(reward);
    DefenseCurves curves = load_curves(curves_path);
    MatrixGame game = from_curves(curves, defense, kind, cfg.attack_cost);
    NashResult res = nash_equilibria(game);

    json out{{"config_hash", hash_hex(cfg)},
             {"master_seed", cfg.master_seed},
             {"defense_level", defense},
             {"game",
              {{"u_D_A", game.u_D_A},
               {"u_D_nA", game.u_D_nA},
               {"u_nD_A", game.u_nD_A},
               {"u_nD_nA", game.u_nD_nA},
               {"c_A", game.c_A},
               {"reward_kind", to_string(kind)}}},
             {"degenerate", res.degenerate},
             {"equilibria", json::array()}};
    for (const auto& eq : res.equilibria) {
        out["equilibria"].push_back(
            {{"p_D", eq.profile.p_D},
             {"p_A", eq.profile.p_A},
             {"kind", to_cstr(eq.kind)},
             {"u_defender", eq.u_defender},
             {"u_adversary", eq.u_adversary},
             {"max_deviation_gain", eq.max_deviation_gain},
             {"mu", {{"d1", eq.mu.d1}, {"d2", eq.mu.d2}, {"a1", eq.mu.a1}, {"a2", eq.mu.a2}}}});
    }
    if (!res.equilibria.empty())
        out["gain_loss"] = to_json(gain_loss_report(game, res.equilibria.front()));
    write_json(out, g.out);
    return 0;
}

int cmd_fp(const GlobalOpts& g, const std::string& curves_path, double defense,
           const std::string& reward, double conv_eps) {
    RunConfig cfg = make_config(g);
    RewardKind kind = reward.empty() ? cfg.reward_kind : reward_kind_from_string(reward);
    DefenseCurves curves = load_curves(curves_path);
    MatrixGame game = from_curves(curves, defense, kind, cfg.attack_cost);
    FpConfig fp = cfg.fp;
    fp.seed = {cfg.master_seed, kFpStream};
    FpTrace trace = run_fp(game, fp);
    std::string out = g.out.empty() ? "fp_trace.csv" : g.out;
    save_trace(trace, out, stamp(cfg));

    double bD = trace.belief_pD.back(), bA = trace.belief_pA.back();
    int window = std::min<int>(100, fp.rounds);
    auto conv = convergence_check(trace, game, window, conv_eps);
    std::printf("fp %s rounds %d final beliefs p_D %.6f p_A %.6f %s\n", out.c_str(), fp.rounds,
                bD, bA, conv ? "converged" : "not converged");
    return 0;
}

json level_solution_json(const LevelGameSolution& s) {
    return {{"d_star", s.d_star},
            {"p_A_star", s.p_A_star},
            {"kind", s.kind == LevelSolKind::interior ? "interior" : "boundary"},
            {"u_defender", s.u_defender},
            {"u_adversary", s.u_adversary},
            {"verified", s.verified},
            {"residual_adversary", s.residual_adversary},
            {"residual_defender", s.residual_defender},
            {"mu", {{"d1", s.mu.d1}, {"d2", s.mu.d2}, {"a1", s.mu.a1}, {"a2", s.mu.a2}}}};
}

int cmd_level(const GlobalOpts& g, const std::string& curves_path, const std::string& reward,
              bool smooth, double stat_tol, double dev_tol) {
    RunConfig cfg = make_config(g);
    LevelGameSpec spec;
    spec.curves = load_curves(curves_path);
    spec.reward_kind = reward.empty() ? cfg.reward_kind : reward_kind_from_string(reward);
    spec.c_A1 = cfg.level_cost_c1;
    spec.c_A2 = cfg.level_cost_c2;
    spec.smooth = smooth;
    spec.stationarity_tol = stat_tol;
    spec.deviation_tol = dev_tol;
    LevelGameResult res = solve_level_equilibrium(spec);

    json out{{"config_hash", hash_hex(cfg)},
             {"master_seed", cfg.master_seed},
             {"reward_kind", to_string(spec.reward_kind)},
             {"c_A1", spec.c_A1},
             {"c_A2", spec.c_A2},
             {"multiple_interior", res.multiple_interior},
             {"diagnostics", res.diagnostics},
             {"solutions", json::array()}};
    for (const auto& s : res.solutions) out["solutions"].push_back(level_solution_json(s));
    write_json(out, g.out);
    return 0;
}

int cmd_cost_sweep(const GlobalOpts& g, const std::string& curves_path,
                   const std::string& reward, bool smooth, double stat_tol, double dev_tol,
                   double c1_start, double c1_stop, double c1_step) {
    RunConfig cfg = make_config(g);
    if (!(c1_step > 0.0) || c1_stop < c1_start)
        throw std::invalid_argument("cost sweep grid must satisfy start <= stop, step > 0");
    LevelGameSpec spec;
    spec.curves = load_curves(curves_path);
    spec.reward_kind = reward.empty() ? cfg.reward_kind : reward_kind_from_string(reward);
    spec.c_A1 = cfg.level_cost_c1;
    spec.c_A2 = cfg.level_cost_c2;
    spec.smooth = smooth;
    spec.stationarity_tol = stat_tol;
    spec.deviation_tol = dev_tol;

    std::vector<double> grid;
    long long n = std::llround((c1_stop - c1_start) / c1_step);
    if (c1_start + static_cast<double>(n) * c1_step > c1_stop + 1e-9)
        n = static_cast<long long>(std::floor((c1_stop - c1_start) / c1_step + 1e-9));
    for (long long i = 0; i <= n; ++i)
        grid.push_back(std::min(c1_start + static_cast<double>(i) * c1_step, c1_stop));

    auto rows = sweep_cost(spec, grid);
    std::string out = g.out.empty() ? "cost_sweep.csv" : g.out;
    save_cost_sweep(rows, out, stamp(cfg));
    std::printf("cost sweep %s (%zu points)\n", out.c_str(), rows.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectrum-sharing defense simulator and game solvers"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON run configuration");
    auto* seed_opt = app.add_option("--seed", g.seed, "Override master seed");
    app.add_option("--out", g.out, "Output path (default depends on the subcommand)");
    app.add_option("--workers", g.workers, "Worker threads for sweeps, 0 = auto");
    app.add_flag("--no-gate", g.no_gate, "Skip the sensing accuracy gate");

    auto* c_train = app.add_subcommand(
        "train", "Train the sensing classifier; exits 2 if the accuracy gate fails");
    std::string dump_frames;
    c_train->add_option("--dump-frames", dump_frames, "Also dump the raw dataset as CSV");

    auto* c_curves =
        app.add_subcommand("curves", "Sweep the defense grid and tabulate reward curves");
    std::string model_path;
    c_curves->add_option("--model", model_path, "Reuse a saved model instead of training");

    std::string curves_path, reward;
    double defense = 0.4, conv_eps = 0.05;
    bool smooth = false;
    double stat_tol = 0.02, dev_tol = 0.02;
    double c1_start = 0.0, c1_stop = 1.0, c1_step = 0.05;

    auto* c_nash = app.add_subcommand("nash", "Solve the 2x2 defense/attack matrix game");
    c_nash->add_option("--curves", curves_path, "Tabulated curves CSV")->required();
    c_nash->add_option("--defense", defense, "Defense level of the 'defend' action");
    c_nash->add_option("--reward", reward, "throughput or success_ratio");

    auto* c_fp = app.add_subcommand("fp", "Run fictitious play on the matrix game");
    c_fp->add_option("--curves", curves_path, "Tabulated curves CSV")->required();
    c_fp->add_option("--defense", defense, "Defense level of the 'defend' action");
    c_fp->add_option("--reward", reward, "throughput or success_ratio");
    c_fp->add_option("--conv-eps", conv_eps, "Convergence tolerance for the final check");

    auto* c_level =
        app.add_subcommand("level", "Solve the continuous defense-level game");
    c_level->add_option("--curves", curves_path, "Tabulated curves CSV")->required();
    c_level->add_option("--reward", reward, "throughput or success_ratio");
    c_level->add_flag("--smooth", smooth, "Smooth the curves before solving");
    c_level->add_option("--stationarity-tol", stat_tol, "Interior stationarity tolerance");
    c_level->add_option("--deviation-tol", dev_tol, "Verification deviation tolerance");

    auto* c_cost = app.add_subcommand("cost-sweep",
                                      "Solve the level game over a grid of attack costs");
    c_cost->add_option("--curves", curves_path, "Tabulated curves CSV")->required();
    c_cost->add_option("--reward", reward, "throughput or success_ratio");
    c_cost->add_flag("--smooth", smooth, "Smooth the curves before solving");
    c_cost->add_option("--stationarity-tol", stat_tol, "Interior stationarity tolerance");
    c_cost->add_option("--deviation-tol", dev_tol, "Verification deviation tolerance");
    c_cost->add_option("--c1-start", c1_start, "First c_A1 value");
    c_cost->add_option("--c1-stop", c1_stop, "Last c_A1 value");
    c_cost->add_option("--c1-step", c1_step, "c_A1 grid step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    g.seed_set = seed_opt->count() > 0;

    try {
        if (app.got_subcommand(c_train)) return cmd_train(g, dump_frames);
        if (app.got_subcommand(c_curves)) return cmd_curves(g, model_path);
        if (app.got_subcommand(c_nash)) return cmd_nash(g, curves_path, defense, reward);
        if (app.got_subcommand(c_fp)) return cmd_fp(g, curves_path, defense, reward, conv_eps);
        if (app.got_subcommand(c_level))
            return cmd_level(g, curves_path, reward, smooth, stat_tol, dev_tol);
        if (app.got_subcommand(c_cost))
            return cmd_cost_sweep(g, curves_path, reward, smooth, stat_tol, dev_tol, c1_start,
                                  c1_stop, c1_step);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::fprintf(stderr, "error: %s\n", msg.c_str());
        bool io = msg.find("cannot open") != std::string::npos ||
                  msg.find("write failed") != std::string::npos;
        return io ? 3 : 1;
    }
    return 1;
}
