#include "specgame/engagement.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace specgame {

namespace {

constexpr std::uint64_t kRoleStride = 1ull << 32;
// Per-episode stream roles. Phase 2 roles exist even when phase 1 is skipped
// so attack and no-attack episodes with the same base stay comparable.
enum Role : std::uint64_t {
    kOcc1 = 0,
    kDefFrames1,
    kAdvFrames1,
    kSuccess1,
    kSurrogateTrain,
    kOcc2,
    kDefFrames2,
    kAdvFrames2,
    kSuccess2,
};

struct PhaseData {
    std::vector<char> occupied;
    std::vector<Prediction> preds;
    std::vector<int> post;        // post-flip decisions
    std::vector<char> transmitted;
    std::vector<char> success_draw;  // u < p_success, drawn per instance
};

PhaseData sense_phase(const EngagementConfig& cfg, const ClassifierModel& defender, int n,
                      std::uint64_t occ_role, std::uint64_t frame_role,
                      std::uint64_t success_role) {
    PhaseData ph;
    ph.occupied.resize(n);
    ph.preds.resize(n);
    RngStream occ_rng(cfg.master_seed, cfg.stream_base + occ_role * kRoleStride);
    ClassifierWorkspace ws;
    for (int i = 0; i < n; ++i) {
        bool occ = occ_rng.uniform01() < cfg.occ.p_occupied;
        ph.occupied[i] = occ;
        IqFrame f = gen_frame(occ, cfg.ch_defender,
                              RngSeed{cfg.master_seed,
                                      cfg.stream_base + frame_role * kRoleStride +
                                          static_cast<std::uint64_t>(i)});
        detail::forward(defender, f, ws);
        ph.preds[i].label = ws.p[1] > ws.p[0] ? 1 : 0;
        ph.preds[i].confidence = ws.p[ph.preds[i].label];
    }
    ph.post = apply_defense(ph.preds, cfg.defense_level);
    ph.transmitted.resize(n);
    ph.success_draw.resize(n);
    RngStream succ_rng(cfg.master_seed, cfg.stream_base + success_role * kRoleStride);
    for (int i = 0; i < n; ++i) {
        ph.transmitted[i] = ph.post[i] == 0;
        // Drawn unconditionally so instance i's draw does not depend on the
        // defense level; only its use does.
        ph.success_draw[i] = succ_rng.uniform01() < cfg.p_success;
    }
    return ph;
}

IqFrame adv_frame(const EngagementConfig& cfg, bool occupied, std::uint64_t role, int i) {
    return gen_frame(occupied, cfg.ch_adversary,
                     RngSeed{cfg.master_seed,
                             cfg.stream_base + role * kRoleStride + static_cast<std::uint64_t>(i)});
}

}  // namespace

void EngagementConfig::validate() const {
    occ.validate();
    ch_defender.validate();
    ch_adversary.validate();
    if (!(p_success >= 0.0 && p_success <= 1.0))
        throw std::invalid_argument("p_success must be in [0,1]");
    if (!(defense_level >= 0.0 && defense_level <= 1.0))
        throw std::invalid_argument("defense_level must be in [0,1]");
    if (n_eval < 1) throw std::invalid_argument("n_eval must be >= 1");
    if (attack_on && n_observe < 100)
        throw std::invalid_argument("n_observe must be >= 100 when attacking");
}

void DefenseCurves::validate() const {
    const std::size_t n = d.size();
    if (n == 0) throw std::invalid_argument("DefenseCurves: empty grid");
    for (const auto* v : {&u_att_tpt, &u_noatt_tpt, &u_att_sr, &u_noatt_sr, &a_j, &r_j})
        if (v->size() != n) throw std::invalid_argument("DefenseCurves: column length mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        if (!(d[k] >= 0.0 && d[k] <= 1.0))
            throw std::invalid_argument("DefenseCurves: d outside [0,1]");
        if (k > 0 && !(d[k] > d[k - 1]))
            throw std::invalid_argument("DefenseCurves: d not strictly increasing");
        for (const auto* v : {&u_att_tpt, &u_noatt_tpt, &u_att_sr, &u_noatt_sr, &a_j, &r_j})
            if (!((*v)[k] >= 0.0 && (*v)[k] <= 1.0))
                throw std::invalid_argument("DefenseCurves: value outside [0,1]");
    }
}

std::vector<int> apply_defense(const std::vector<Prediction>& decisions, double d) {
    if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("apply_defense: d must be in [0,1]");
    const std::size_t n = decisions.size();
    std::vector<int> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = decisions[k].label;
    auto n_flip = static_cast<std::size_t>(std::llround(d * static_cast<double>(n)));
    if (n_flip == 0) return out;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&decisions](std::size_t a, std::size_t b) {
        if (decisions[a].confidence != decisions[b].confidence)
            return decisions[a].confidence > decisions[b].confidence;
        return a < b;
    });
    for (std::size_t k = 0; k < n_flip && k < n; ++k) out[idx[k]] = 1 - out[idx[k]];
    return out;
}

std::pair<EngagementMetrics, std::vector<DecisionRecord>> run_episode(
    const EngagementConfig& cfg, const ClassifierModel& defender) {
    cfg.validate();

    // Phase 1: the adversary watches the defender and trains its surrogate.
    std::optional<ClassifierModel> surrogate;
    bool fallback = false;
    if (cfg.attack_on) {
        PhaseData ph = sense_phase(cfg, defender, cfg.n_observe, kOcc1, kDefFrames1, kSuccess1);
        std::vector<IqFrame> adv_frames;
        std::vector<int> labels;
        adv_frames.reserve(cfg.n_observe);
        labels.reserve(cfg.n_observe);
        bool has0 = false, has1 = false;
        for (int i = 0; i < cfg.n_observe; ++i) {
            adv_frames.push_back(adv_frame(cfg, ph.occupied[i], kAdvFrames1, i));
            int success = ph.transmitted[i] && !ph.occupied[i] && ph.success_draw[i];
            labels.push_back(success);
            (success ? has1 : has0) = true;
        }
        if (!has0 || !has1) {
            std::fprintf(stderr,
                         "warning: adversary observed a single outcome class; "
                         "falling back to never-jam\n");
            fallback = true;
        } else {
            TrainConfig tc = cfg.surrogate_train;
            tc.seed = RngSeed{cfg.master_seed, cfg.stream_base + kSurrogateTrain * kRoleStride};
            surrogate = train(adv_frames, labels, tc, cfg.ch_adversary.samples_per_frame);
        }
    }

    // Phase 2: the measured engagement.
    PhaseData ph = sense_phase(cfg, defender, cfg.n_eval, kOcc2, kDefFrames2, kSuccess2);
    std::vector<DecisionRecord> records(cfg.n_eval);
    ClassifierWorkspace ws;
    long successes = 0, transmissions = 0, jams = 0, adv_correct = 0;
    for (int i = 0; i < cfg.n_eval; ++i) {
        bool would_succeed = ph.transmitted[i] && !ph.occupied[i] && ph.success_draw[i];
        bool jam = false;
        if (cfg.attack_on && !fallback) {
            IqFrame f = adv_frame(cfg, ph.occupied[i], kAdvFrames2, i);
            detail::forward(*surrogate, f, ws);
            jam = ws.p[1] > ws.p[0];
        }
        bool success = would_succeed && !jam;

        DecisionRecord& r = records[i];
        r.occupied = ph.occupied[i];
        r.prediction = ph.preds[i].label;
        r.confidence = ph.preds[i].confidence;
        r.transmitted = ph.transmitted[i];
        if (cfg.attack_on) r.jammed = jam;
        r.outcome = !ph.transmitted[i] ? Outcome::no_transmission
                    : success          ? Outcome::success
                                       : Outcome::fail;
        transmissions += ph.transmitted[i] ? 1 : 0;
        successes += success ? 1 : 0;
        jams += jam ? 1 : 0;
        adv_correct += (jam == would_succeed) ? 1 : 0;
    }

    EngagementMetrics m;
    m.throughput = static_cast<double>(successes) / static_cast<double>(cfg.n_eval);
    m.success_ratio = transmissions > 0
                          ? static_cast<double>(successes) / static_cast<double>(transmissions)
                          : 0.0;
    if (cfg.attack_on) {
        m.adversary_accuracy =
            static_cast<double>(adv_correct) / static_cast<double>(cfg.n_eval);
        m.jam_ratio = static_cast<double>(jams) / static_cast<double>(cfg.n_eval);
    }
    m.surrogate_fallback = fallback;
    return {m, std::move(records)};
}

DefenseCurves sweep_defense(const EngagementConfig& cfg_template,
                            const std::vector<double>& d_grid,
                            const ClassifierModel& defender, int replications, int workers) {
    if (d_grid.empty()) throw std::invalid_argument("sweep_defense: empty grid");
    for (std::size_t k = 0; k < d_grid.size(); ++k) {
        if (!(d_grid[k] >= 0.0 && d_grid[k] <= 1.0))
            throw std::invalid_argument("sweep_defense: grid outside [0,1]");
        if (k > 0 && !(d_grid[k] > d_grid[k - 1]))
            throw std::invalid_argument("sweep_defense: grid not increasing");
    }
    if (replications < 1) throw std::invalid_argument("sweep_defense: replications must be >= 1");
    if (workers < 1) workers = 1;

    struct Job {
        EngagementConfig cfg;
        EngagementMetrics result;
    };
    std::vector<Job> jobs;
    jobs.reserve(d_grid.size() * 2 * replications);
    for (std::size_t di = 0; di < d_grid.size(); ++di) {
        for (int attack = 0; attack < 2; ++attack) {
            for (int rep = 0; rep < replications; ++rep) {
                EngagementConfig cfg = cfg_template;
                cfg.defense_level = d_grid[di];
                cfg.attack_on = attack == 1;
                std::uint64_t episode_index =
                    (static_cast<std::uint64_t>(di) * 2 + attack) *
                        static_cast<std::uint64_t>(replications) +
                    static_cast<std::uint64_t>(rep);
                cfg.stream_base = cfg_template.stream_base + episode_index * (1ull << 40);
                jobs.push_back(Job{cfg, {}});
            }
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&jobs, &next, &defender]() {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            jobs[k].result = run_episode(jobs[k].cfg, defender).first;
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    DefenseCurves curves;
    curves.d = d_grid;
    const auto reps = static_cast<double>(replications);
    std::size_t j = 0;
    for (std::size_t di = 0; di < d_grid.size(); ++di) {
        double att_tpt = 0, att_sr = 0, noatt_tpt = 0, noatt_sr = 0, aj = 0, rj = 0;
        for (int attack = 0; attack < 2; ++attack) {
            for (int rep = 0; rep < replications; ++rep, ++j) {
                const EngagementMetrics& m = jobs[j].result;
                if (attack) {
                    att_tpt += m.throughput;
                    att_sr += m.success_ratio;
                    aj += m.adversary_accuracy.value_or(0.0);
                    rj += m.jam_ratio;
                } else {
                    noatt_tpt += m.throughput;
                    noatt_sr += m.success_ratio;
                }
            }
        }
        curves.u_att_tpt.push_back(att_tpt / reps);
        curves.u_att_sr.push_back(att_sr / reps);
        curves.u_noatt_tpt.push_back(noatt_tpt / reps);
        curves.u_noatt_sr.push_back(noatt_sr / reps);
        curves.a_j.push_back(aj / reps);
        curves.r_j.push_back(rj / reps);
    }
    curves.validate();
    return curves;
}

static const char* kCurvesHeader = "d,u_att_tpt,u_noatt_tpt,u_att_sr,u_noatt_sr,a_j,r_j";

void save_curves(const DefenseCurves& curves, const std::string& path,
                 const std::vector<std::string>& comment_lines) {
    curves.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& c : comment_lines) out << "# " << c << "\n";
    out << kCurvesHeader << "\n";
    char buf[32];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.6g", v);
        out << buf << sep;
    };
    for (std::size_t k = 0; k < curves.d.size(); ++k) {
        put(curves.d[k], ',');
        put(curves.u_att_tpt[k], ',');
        put(curves.u_noatt_tpt[k], ',');
        put(curves.u_att_sr[k], ',');
        put(curves.u_noatt_sr[k], ',');
        put(curves.a_j[k], ',');
        put(curves.r_j[k], '\n');
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

DefenseCurves load_curves(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    DefenseCurves curves;
    std::string line;
    long line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != kCurvesHeader)
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": bad header, expected '" + kCurvesHeader + "'");
            saw_header = true;
            continue;
        }
        std::array<double, 7> v{};
        std::size_t pos = 0;
        for (int col = 0; col < 7; ++col) {
            std::size_t next_c = line.find(',', pos);
            std::string tok = line.substr(pos, next_c == std::string::npos ? std::string::npos
                                                                           : next_c - pos);
            char* endp = nullptr;
            v[col] = std::strtod(tok.c_str(), &endp);
            if (endp == tok.c_str() || *endp != '\0')
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": bad number '" + tok + "'");
            if (col < 6) {
                if (next_c == std::string::npos)
                    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                             ": expected 7 columns");
                pos = next_c + 1;
            } else if (next_c != std::string::npos) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": trailing data");
            }
        }
        curves.d.push_back(v[0]);
        curves.u_att_tpt.push_back(v[1]);
        curves.u_noatt_tpt.push_back(v[2]);
        curves.u_att_sr.push_back(v[3]);
        curves.u_noatt_sr.push_back(v[4]);
        curves.a_j.push_back(v[5]);
        curves.r_j.push_back(v[6]);
    }
    if (!saw_header) throw std::runtime_error(path + ": missing header line");
    try {
        curves.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return curves;
}

}  // namespace specgame
