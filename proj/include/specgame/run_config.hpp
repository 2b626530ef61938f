#pragma once

#include <cstdint>
#include <string>

#include "specgame/classifier.hpp"
#include "specgame/engagement.hpp"
#include "specgame/fictitious_play.hpp"
#include "specgame/matrix_game.hpp"

namespace specgame {

// Top-level run configuration. Every field has a default; JSON files may
// override any subset but unknown keys are rejected to catch typos.
struct RunConfig {
  ChannelParams channel;            // shared by defender and adversary
  OccupancyProcess occupancy;
  double p_success = 0.95;
  TrainConfig defender_train;       // seed fields here are ignored; streams
  TrainConfig surrogate_train;      //   are derived from master_seed
  int n_dataset = 1000;             // defender's own sensing dataset
  int n_observe = 1000;
  int n_eval = 10000;
  double train_split = 0.8;

  double grid_start = 0.0;
  double grid_stop = 1.0;
  double grid_step = 0.05;
  int replications = 10;

  double attack_cost = 0.3;         // c_A for the matrix game
  double level_cost_c1 = 0.1;       // flat attack cost in the level game
  double level_cost_c2 = 0.1;       // per-jam cost scale
  RewardKind reward_kind = RewardKind::throughput;

  FpConfig fp;

  double min_accuracy = 0.95;       // sensing gate; 0 disables
  std::uint64_t master_seed = 20250815;

  void validate() const;            // throws std::invalid_argument

  // Engagement config for one defense level; stream_base separates episodes.
  EngagementConfig engagement(double defense_level, bool attack_on) const;

  std::vector<double> grid() const;
};

// Defender-side stream layout under master_seed: the sensing dataset occupies
// stream indices [0, n_dataset], the train/test split and the training loop
// use the two constants below. Episode streams start at
// EngagementConfig::stream_base and never overlap these.
inline constexpr std::uint64_t kSplitStream = 1ull << 32;
inline constexpr std::uint64_t kDefenderTrainStream = (1ull << 32) + 1;
inline constexpr std::uint64_t kFpStream = (1ull << 32) + 2;

struct DefenderBundle {
  ClassifierModel model;
  double test_accuracy = 0.0;
};

// Generates the sensing dataset, splits it, trains the defender and evaluates
// it on the held-out part, all under the config's stream layout.
DefenderBundle train_defender(const RunConfig& cfg);

// Parses JSON text. Missing keys keep defaults; unknown keys (at any level)
// throw std::invalid_argument naming the offending key.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);  // std::runtime_error on I/O

// Canonical serialization (sorted keys, fixed float format).
std::string dump_config(const RunConfig& cfg);

// FNV-1a 64 over the canonical dump; stable across platforms.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace specgame
