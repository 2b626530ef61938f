#include "specgame/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace specgame {

using nlohmann::json;

void RunConfig::validate() const {
  channel.validate();
  occupancy.validate();
  auto bad = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
  if (!(p_success >= 0.0 && p_success <= 1.0)) bad("p_success must be in [0, 1]");
  for (const auto* t : {&defender_train, &surrogate_train}) {
    if (t->epochs <= 0) bad("epochs must be positive");
    if (t->batch_size <= 0) bad("batch_size must be positive");
    if (!(t->learning_rate > 0.0)) bad("learning_rate must be positive");
  }
  if (n_dataset <= 0) bad("n_dataset must be positive");
  if (n_observe <= 0) bad("n_observe must be positive");
  if (n_eval <= 0) bad("n_eval must be positive");
  if (!(train_split > 0.0 && train_split < 1.0)) bad("train_split must be in (0, 1)");
  if (!(grid_step > 0.0)) bad("grid.step must be positive");
  if (!(grid_start >= 0.0 && grid_stop <= 1.0 && grid_start <= grid_stop))
    bad("grid must satisfy 0 <= start <= stop <= 1");
  if (replications <= 0) bad("replications must be positive");
  if (!(attack_cost >= 0.0)) bad("attack_cost must be nonnegative");
  if (!(level_cost_c1 >= 0.0) || !(level_cost_c2 >= 0.0))
    bad("level costs must be nonnegative");
  if (!(min_accuracy >= 0.0 && min_accuracy <= 1.0)) bad("min_accuracy must be in [0, 1]");
  fp.validate();
}

EngagementConfig RunConfig::engagement(double defense_level, bool attack_on) const {
  EngagementConfig e;
  e.occ = occupancy;
  e.ch_defender = channel;
  e.ch_adversary = channel;
  e.p_success = p_success;
  e.defense_level = defense_level;
  e.attack_on = attack_on;
  e.n_observe = n_observe;
  e.n_eval = n_eval;
  e.surrogate_train = surrogate_train;
  e.master_seed = master_seed;
  return e;
}

std::vector<double> RunConfig::grid() const {
  std::vector<double> g;
  long long n = std::llround((grid_stop - grid_start) / grid_step);
  if (grid_start + static_cast<double>(n) * grid_step > grid_stop + 1e-9)
    n = static_cast<long long>(std::floor((grid_stop - grid_start) / grid_step + 1e-9));
  for (long long i = 0; i <= n; ++i)
    g.push_back(std::min(grid_start + static_cast<double>(i) * grid_step, grid_stop));
  return g;
}

DefenderBundle train_defender(const RunConfig& cfg) {
  auto data = gen_dataset(cfg.n_dataset, cfg.occupancy, cfg.channel, {cfg.master_seed, 0});
  auto [train_set, test_set] =
      split_dataset(data, cfg.train_split, {cfg.master_seed, kSplitStream});
  TrainConfig tc = cfg.defender_train;
  tc.seed = {cfg.master_seed, kDefenderTrainStream};
  DefenderBundle b{train(train_set, tc), 0.0};
  b.test_accuracy = evaluate(b.model, test_set);
  b.model.train_accuracy = b.test_accuracy;
  return b;
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                    const std::string& scope) {
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* want : keys)
      if (k == want) { known = true; break; }
    if (!known)
      throw std::invalid_argument("config: unknown key \"" + scope + k + "\"");
  }
}

void parse_train(const json& j, const std::string& scope, TrainConfig* out) {
  reject_unknown(j, {"epochs", "batch_size", "learning_rate"}, scope);
  if (j.contains("epochs")) out->epochs = j.at("epochs").get<int>();
  if (j.contains("batch_size")) out->batch_size = j.at("batch_size").get<int>();
  if (j.contains("learning_rate")) out->learning_rate = j.at("learning_rate").get<double>();
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

  RunConfig cfg;
  reject_unknown(j,
                 {"channel", "occupancy", "p_success", "defender_train", "surrogate_train",
                  "n_dataset", "n_observe", "n_eval", "train_split", "grid", "replications",
                  "attack_cost", "level_costs", "reward_kind", "fp", "min_accuracy",
                  "master_seed"},
                 "");
  if (j.contains("channel")) {
    const json& c = j.at("channel");
    reject_unknown(c, {"scale", "snr_db", "samples_per_frame"}, "channel.");
    if (c.contains("scale")) cfg.channel.rayleigh_scale = c.at("scale").get<double>();
    if (c.contains("snr_db")) cfg.channel.snr_db = c.at("snr_db").get<double>();
    if (c.contains("samples_per_frame"))
      cfg.channel.samples_per_frame = c.at("samples_per_frame").get<int>();
  }
  if (j.contains("occupancy")) {
    const json& c = j.at("occupancy");
    reject_unknown(c, {"p_occupied"}, "occupancy.");
    if (c.contains("p_occupied")) cfg.occupancy.p_occupied = c.at("p_occupied").get<double>();
  }
  if (j.contains("p_success")) cfg.p_success = j.at("p_success").get<double>();
  if (j.contains("defender_train"))
    parse_train(j.at("defender_train"), "defender_train.", &cfg.defender_train);
  if (j.contains("surrogate_train"))
    parse_train(j.at("surrogate_train"), "surrogate_train.", &cfg.surrogate_train);
  if (j.contains("n_dataset")) cfg.n_dataset = j.at("n_dataset").get<int>();
  if (j.contains("n_observe")) cfg.n_observe = j.at("n_observe").get<int>();
  if (j.contains("n_eval")) cfg.n_eval = j.at("n_eval").get<int>();
  if (j.contains("train_split")) cfg.train_split = j.at("train_split").get<double>();
  if (j.contains("grid")) {
    const json& c = j.at("grid");
    reject_unknown(c, {"start", "stop", "step"}, "grid.");
    if (c.contains("start")) cfg.grid_start = c.at("start").get<double>();
    if (c.contains("stop")) cfg.grid_stop = c.at("stop").get<double>();
    if (c.contains("step")) cfg.grid_step = c.at("step").get<double>();
  }
  if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
  if (j.contains("attack_cost")) cfg.attack_cost = j.at("attack_cost").get<double>();
  if (j.contains("level_costs")) {
    const json& c = j.at("level_costs");
    reject_unknown(c, {"c1", "c2"}, "level_costs.");
    if (c.contains("c1")) cfg.level_cost_c1 = c.at("c1").get<double>();
    if (c.contains("c2")) cfg.level_cost_c2 = c.at("c2").get<double>();
  }
  if (j.contains("reward_kind"))
    cfg.reward_kind = reward_kind_from_string(j.at("reward_kind").get<std::string>());
  if (j.contains("fp")) {
    const json& c = j.at("fp");
    reject_unknown(c,
                   {"rounds", "init_belief_defender", "init_belief_adversary", "tie_break",
                    "mode"},
                   "fp.");
    if (c.contains("rounds")) cfg.fp.rounds = c.at("rounds").get<int>();
    if (c.contains("init_belief_defender"))
      cfg.fp.init_belief_D = c.at("init_belief_defender").get<double>();
    if (c.contains("init_belief_adversary"))
      cfg.fp.init_belief_A = c.at("init_belief_adversary").get<double>();
    if (c.contains("tie_break"))
      cfg.fp.tie_break = tie_break_from_string(c.at("tie_break").get<std::string>());
    if (c.contains("mode")) cfg.fp.mode = fp_mode_from_string(c.at("mode").get<std::string>());
  }
  if (j.contains("min_accuracy")) cfg.min_accuracy = j.at("min_accuracy").get<double>();
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) {
  json j;
  j["channel"] = {{"scale", cfg.channel.rayleigh_scale},
                  {"snr_db", cfg.channel.snr_db},
                  {"samples_per_frame", cfg.channel.samples_per_frame}};
  j["occupancy"] = {{"p_occupied", cfg.occupancy.p_occupied}};
  j["p_success"] = cfg.p_success;
  j["defender_train"] = {{"epochs", cfg.defender_train.epochs},
                         {"batch_size", cfg.defender_train.batch_size},
                         {"learning_rate", cfg.defender_train.learning_rate}};
  j["surrogate_train"] = {{"epochs", cfg.surrogate_train.epochs},
                          {"batch_size", cfg.surrogate_train.batch_size},
                          {"learning_rate", cfg.surrogate_train.learning_rate}};
  j["n_dataset"] = cfg.n_dataset;
  j["n_observe"] = cfg.n_observe;
  j["n_eval"] = cfg.n_eval;
  j["train_split"] = cfg.train_split;
  j["grid"] = {{"start", cfg.grid_start}, {"stop", cfg.grid_stop}, {"step", cfg.grid_step}};
  j["replications"] = cfg.replications;
  j["attack_cost"] = cfg.attack_cost;
  j["level_costs"] = {{"c1", cfg.level_cost_c1}, {"c2", cfg.level_cost_c2}};
  j["reward_kind"] = to_string(cfg.reward_kind);
  j["fp"] = {{"rounds", cfg.fp.rounds},
             {"init_belief_defender", cfg.fp.init_belief_D},
             {"init_belief_adversary", cfg.fp.init_belief_A},
             {"tie_break", to_string(cfg.fp.tie_break)},
             {"mode", to_string(cfg.fp.mode)}};
  j["min_accuracy"] = cfg.min_accuracy;
  j["master_seed"] = cfg.master_seed;
  return j.dump(2);  // nlohmann orders keys lexicographically: canonical
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::string s = dump_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace specgame
