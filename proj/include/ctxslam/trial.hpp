#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ctxslam/control_agent.hpp"
#include "ctxslam/edge_agent.hpp"
#include "ctxslam/label_grid.hpp"
#include "ctxslam/metrics.hpp"
#include "ctxslam/ontology.hpp"
#include "ctxslam/scenario.hpp"
#include "ctxslam/segmentation.hpp"

namespace ctxslam {

struct OracleParams {
  bool enabled = true;
  double threshold = 0.05;  // km
};

struct TrialConfig {
  // Exactly one world source: a scenario file or generator parameters.
  std::filesystem::path scenario_path;
  std::optional<GeneratorParams> generator;
  std::filesystem::path ontology_path;

  int agent_count = 3;
  SensorParams sensor;
  MotionParams motion;  // carries sigma_drift
  OracleParams oracle;
  MergeConfig merge;
  IncentiveParams incentive;
  double alpha = 0.5;
  double grid_threshold = 0.7;
  int sparsity_floor = 4;
  int max_depth = 3;
  std::optional<Vec2> nnn_seed;  // defaults to the bounds centre
  int nnn_momentum = 0;
  double adjacency_distance = 0.0;
  int max_trade_rounds = 4;
  int sync_interval = 10;  // simulated seconds
  long step_cap = 1'000'000;
  double match_radius = 0.05;  // km, topology matching
  std::uint64_t seed = 0;

  // Throws InvalidArgument when an invariant fails.
  void validate() const;
};

// JSON config. Relative paths resolve against `base_dir`. Unknown keys are
// rejected with ParseError. A generator without its own seed uses the
// master seed.
TrialConfig parse_trial_config(std::string_view json_text,
                               const std::filesystem::path& base_dir = {});
TrialConfig load_trial_config(const std::filesystem::path& path);

struct TrialResult {
  TrialReport report;
  ScenarioSpec scenario;
  std::vector<Landmark> collective;    // merged static landmarks, collective frame
  std::vector<Landmark> observations;  // merged dynamic observations
  GridSegmentation grid;
  BranchSegmentation branch;
  LabelGrid truth;
  LabelGrid pred_grid;
  LabelGrid pred_branch;
  std::vector<bool> explored;  // 24x24 cells crossed by any agent
};

// Loads ontology and world from the config and runs the simulation.
TrialResult run_trial(const TrialConfig& config);
// Runs on an already loaded world. The scenario's agent starts are used when
// it lists enough of them.
TrialResult run_trial(const TrialConfig& config, const Ontology& ontology,
                      const ScenarioSpec& scenario);

// Builds the world described by the config.
ScenarioSpec resolve_scenario(const TrialConfig& config, const Ontology& ontology);

struct BatchRow {
  bool ok = false;
  std::string error;
  TrialReport report;
};

// Trials run independently, on up to `threads` workers; rows keep input order.
std::vector<BatchRow> run_batch(const std::vector<TrialConfig>& configs, int threads = 1);

// Cartesian product over a JSON object of value lists, in key order. Keys:
// density, seed, sigma_drift, agents, alpha, grid_threshold, sparsity_floor.
// A density requires a generator in the base config.
std::vector<TrialConfig> expand_sweep(const TrialConfig& base, std::string_view sweep_json);

}  // namespace ctxslam
