#include "ctxslam/trial.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <nlohmann/json.hpp>
#include <set>
#include <thread>

#include "ctxslam/error.hpp"
#include "ctxslam/io.hpp"
#include "ctxslam/random.hpp"

namespace ctxslam {

using nlohmann::ordered_json;

void TrialConfig::validate() const {
  if (agent_count < 1) throw InvalidArgument("agent count must be at least 1");
  if (scenario_path.empty() == !generator.has_value())
    throw InvalidArgument("config needs exactly one of a scenario path or a generator");
  if (sensor.range <= 0.0 || sensor.field_of_view <= 0.0)
    throw InvalidArgument("sensor range and field of view must be positive");
  if (sensor.p_detect < 0.0 || sensor.p_detect > 1.0)
    throw InvalidArgument("p_detect must lie in [0, 1]");
  if (sensor.sigma_range < 0.0 || sensor.sigma_bearing < 0.0 || motion.sigma_drift < 0.0)
    throw InvalidArgument("noise sigmas must be non-negative");
  if (sensor.confidence_min < 0.0 || sensor.confidence_max > 1.0 ||
      sensor.confidence_min > sensor.confidence_max)
    throw InvalidArgument("confidence bounds must satisfy 0 <= min <= max <= 1");
  if (motion.speed < 0.0 || motion.acquisition_distance <= 0.0 || motion.step_budget < 1)
    throw InvalidArgument("invalid motion parameters");
  if (oracle.threshold < 0.0) throw InvalidArgument("oracle threshold must be non-negative");
  merge.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (grid_threshold < 0.0 || grid_threshold > 1.0)
    throw InvalidArgument("grid threshold must lie in [0, 1]");
  if (sparsity_floor < 1) throw InvalidArgument("sparsity floor must be at least 1");
  if (max_depth < 0 || max_depth > 3) throw InvalidArgument("max depth must lie in [0, 3]");
  if (nnn_momentum < 0 || max_trade_rounds < 0)
    throw InvalidArgument("momentum and trade rounds must be non-negative");
  if (sync_interval < 1) throw InvalidArgument("sync interval must be at least 1");
  if (step_cap < 1) throw InvalidArgument("step cap must be at least 1");
  if (!(match_radius > 0.0)) throw InvalidArgument("match radius must be positive");
}

namespace {

void reject_unknown_keys(const ordered_json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  if (!obj.is_object()) throw ParseError(std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const auto a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
void read(const ordered_json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

TrialConfig parse_trial_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  TrialConfig cfg;
  try {
    reject_unknown_keys(doc,
                        {"scenario", "generator", "ontology", "agents", "sensor", "motion", "drift",
                         "oracle", "merge", "incentive", "semantics", "grid", "branch",
                         "sync_interval", "step_cap", "match_radius", "seed"},
                        "config");
    read(doc, "seed", cfg.seed);
    if (doc.contains("scenario")) cfg.scenario_path = resolve(base_dir, doc.at("scenario").get<std::string>());
    if (!doc.contains("ontology")) throw ParseError("config: missing 'ontology'");
    cfg.ontology_path = resolve(base_dir, doc.at("ontology").get<std::string>());
    read(doc, "agents", cfg.agent_count);
    if (doc.contains("generator")) {
      const auto& g = doc.at("generator");
      reject_unknown_keys(g, {"preset", "density", "densities", "seed"}, "generator");
      GeneratorParams gp;
      read(g, "preset", gp.preset);
      if (g.contains("density")) gp.densities = {g.at("density").get<double>()};
      read(g, "densities", gp.densities);
      gp.seed = g.value("seed", cfg.seed);
      cfg.generator = gp;
    }
    if (doc.contains("sensor")) {
      const auto& s = doc.at("sensor");
      reject_unknown_keys(s, {"range", "field_of_view", "p_detect", "sigma_range", "sigma_bearing",
                              "confidence_min", "confidence_max"},
                          "sensor");
      read(s, "range", cfg.sensor.range);
      read(s, "field_of_view", cfg.sensor.field_of_view);
      read(s, "p_detect", cfg.sensor.p_detect);
      read(s, "sigma_range", cfg.sensor.sigma_range);
      read(s, "sigma_bearing", cfg.sensor.sigma_bearing);
      read(s, "confidence_min", cfg.sensor.confidence_min);
      read(s, "confidence_max", cfg.sensor.confidence_max);
    }
    if (doc.contains("motion")) {
      const auto& m = doc.at("motion");
      reject_unknown_keys(m, {"speed", "max_turn", "incentive_weight", "acquisition_distance",
                              "step_budget"},
                          "motion");
      read(m, "speed", cfg.motion.speed);
      read(m, "max_turn", cfg.motion.max_turn);
      read(m, "incentive_weight", cfg.motion.incentive_weight);
      read(m, "acquisition_distance", cfg.motion.acquisition_distance);
      read(m, "step_budget", cfg.motion.step_budget);
    }
    if (doc.contains("drift")) {
      reject_unknown_keys(doc.at("drift"), {"sigma"}, "drift");
      read(doc.at("drift"), "sigma", cfg.motion.sigma_drift);
    }
    if (doc.contains("oracle")) {
      reject_unknown_keys(doc.at("oracle"), {"enabled", "threshold"}, "oracle");
      read(doc.at("oracle"), "enabled", cfg.oracle.enabled);
      read(doc.at("oracle"), "threshold", cfg.oracle.threshold);
    }
    if (doc.contains("merge")) {
      const auto& m = doc.at("merge");
      reject_unknown_keys(m, {"merge_radius", "proximity_tolerance", "resurrection_threshold",
                              "confidence_floor"},
                          "merge");
      read(m, "merge_radius", cfg.merge.merge_radius);
      read(m, "proximity_tolerance", cfg.merge.proximity_tolerance);
      read(m, "resurrection_threshold", cfg.merge.resurrection_threshold);
      read(m, "confidence_floor", cfg.merge.confidence_floor);
    }
    if (doc.contains("incentive")) {
      reject_unknown_keys(doc.at("incentive"), {"gain", "distance_cap"}, "incentive");
      read(doc.at("incentive"), "gain", cfg.incentive.gain);
      read(doc.at("incentive"), "distance_cap", cfg.incentive.distance_cap);
    }
    if (doc.contains("semantics")) {
      reject_unknown_keys(doc.at("semantics"), {"alpha"}, "semantics");
      read(doc.at("semantics"), "alpha", cfg.alpha);
    }
    if (doc.contains("grid")) {
      reject_unknown_keys(doc.at("grid"), {"threshold", "sparsity_floor", "max_depth"}, "grid");
      read(doc.at("grid"), "threshold", cfg.grid_threshold);
      read(doc.at("grid"), "sparsity_floor", cfg.sparsity_floor);
      read(doc.at("grid"), "max_depth", cfg.max_depth);
    }
    if (doc.contains("branch")) {
      const auto& b = doc.at("branch");
      reject_unknown_keys(b, {"seed", "momentum", "adjacency_distance", "max_trade_rounds"}, "branch");
      if (b.contains("seed")) {
        const auto xy = b.at("seed").get<std::vector<double>>();
        if (xy.size() != 2) throw ParseError("branch.seed must be [x, y]");
        cfg.nnn_seed = Vec2{xy[0], xy[1]};
      }
      read(b, "momentum", cfg.nnn_momentum);
      read(b, "adjacency_distance", cfg.adjacency_distance);
      read(b, "max_trade_rounds", cfg.max_trade_rounds);
    }
    read(doc, "sync_interval", cfg.sync_interval);
    read(doc, "step_cap", cfg.step_cap);
    read(doc, "match_radius", cfg.match_radius);
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (cfg.generator) cfg.generator->agent_count = cfg.agent_count;
  cfg.validate();
  return cfg;
}

TrialConfig load_trial_config(const std::filesystem::path& path) {
  return parse_trial_config(read_text_file(path), path.parent_path());
}

ScenarioSpec resolve_scenario(const TrialConfig& config, const Ontology& ontology) {
  if (config.generator) {
    GeneratorParams gp = *config.generator;
    gp.agent_count = config.agent_count;
    return generate_scenario(gp, ontology);
  }
  return load_scenario(config.scenario_path, ontology);
}

TrialResult run_trial(const TrialConfig& config) {
  config.validate();
  const Ontology ontology = load_ontology(config.ontology_path);
  const ScenarioSpec scenario = resolve_scenario(config, ontology);
  return run_trial(config, ontology, scenario);
}

TrialResult run_trial(const TrialConfig& config, const Ontology& ontology,
                      const ScenarioSpec& scenario) {
  config.validate();
  validate_scenario(scenario, ontology);
  const Rect bounds = scenario.bounds();
  const int n = config.agent_count;

  std::vector<Pose> starts = scenario.agent_starts;
  if (static_cast<int>(starts.size()) < n) starts = default_agent_starts(bounds, n);

  std::vector<AgentState> agents;
  std::vector<Rng> rngs;
  ControlAgent control(ontology, config.merge);
  for (int i = 0; i < n; ++i) {
    MotionParams motion = config.motion;
    agents.emplace_back(i, starts[static_cast<std::size_t>(i)], config.sensor, motion);
    rngs.emplace_back(substream_seed(config.seed, "agent", static_cast<std::uint64_t>(i)));
    control.register_agent(i, starts[static_cast<std::size_t>(i)]);
  }

  std::set<std::uint32_t> static_ids;
  std::set<std::uint32_t> dynamic_ids;
  for (const auto& f : scenario.features) (f.is_static ? static_ids : dynamic_ids).insert(f.id);
  std::set<std::uint32_t> acquired;
  std::set<std::uint32_t> observed;

  CoverageTracker tracker(bounds, config.sensor.sweep_width());
  std::vector<bool> explored_mask(static_cast<std::size_t>(kEvalGridSize) * kEvalGridSize, false);
  const auto mark_explored = [&](Vec2 a, Vec2 b) {
    const double step = std::min(bounds.width(), bounds.height()) / kEvalGridSize / 4.0;
    const int k = static_cast<int>(std::ceil(distance(a, b) / step));
    for (int s = 0; s <= k; ++s) {
      const Vec2 p = k == 0 ? a : a + (b - a) * (static_cast<double>(s) / k);
      const auto [r, c] = LabelGrid::cell_of(bounds, kEvalGridSize, kEvalGridSize, p);
      explored_mask[static_cast<std::size_t>(r) * kEvalGridSize + c] = true;
    }
  };
  for (const auto& a : agents) {
    tracker.visit(a.true_pose.position);
    mark_explored(a.true_pose.position, a.true_pose.position);
  }

  TrialResult result;
  TrialReport& report = result.report;
  std::vector<std::vector<Vec2>> dispersion_samples;

  const auto discovered_all = [&] {
    return acquired.size() == static_ids.size() && observed.size() == dynamic_ids.size();
  };
  const auto sync = [&](double time) {
    for (const auto& a : agents) control.receive(a.local_map, a.observations, time);
    std::set<std::uint32_t> shared;
    for (const auto& a : agents) shared.insert(a.known_features.begin(), a.known_features.end());
    for (auto& a : agents) {
      a.known_features.insert(shared.begin(), shared.end());
      if (a.target && a.known_features.contains(a.target->feature_id)) a.target.reset();
    }
    report.er_times.push_back(time);
    report.er_series.push_back(avg_center_offset_error(control.collective().landmarks()));
  };

  long step = 0;
  bool done = discovered_all();
  while (!done && step < config.step_cap) {
    ++step;
    const double time = static_cast<double>(step) * kStepSeconds;
    std::vector<Vec2> believed;
    for (const auto& a : agents) believed.push_back(a.believed_pose.position);
    const auto incentives = dispersion_incentives(believed, bounds, config.incentive);

    for (int i = 0; i < n; ++i) {
      AgentState& agent = agents[static_cast<std::size_t>(i)];
      Rng& rng = rngs[static_cast<std::size_t>(i)];
      const Vec2 before = agent.true_pose.position;

      const auto detections = sense(scenario, agent, rng);
      const auto parts = partition_detections(ontology, detections);
      for (const auto& d : parts.dynamic_detections) {
        log_observation(agent, d);
        observed.insert(d.feature_id);
      }
      if (!agent.target) {
        if (const auto t = select_target(parts.static_detections, agent))
          agent.target = Target{t->feature_id, t->feature_class, t->confidence, 0};
      }
      if (agent.target) {
        const ApproachResult r = approach_step(agent, scenario, rng);
        if (r.status == ApproachStatus::Acquired) {
          acquired.insert(r.landmark->feature_id);
          if (config.oracle.enabled) oracle_correct(agent, config.oracle.threshold);
        }
      } else {
        random_walk_step(agent, incentives[static_cast<std::size_t>(i)], bounds, rng);
      }
      apply_drift(agent, rng);
      tracker.visit_segment(before, agent.true_pose.position);
      mark_explored(before, agent.true_pose.position);
    }

    std::vector<Vec2> positions;
    for (const auto& a : agents) positions.push_back(a.true_pose.position);
    dispersion_samples.push_back(std::move(positions));

    done = discovered_all();
    if (done || step % config.sync_interval == 0 || step == config.step_cap) sync(time);
  }
  if (step == 0) sync(0.0);
  if (dispersion_samples.empty()) {
    std::vector<Vec2> positions;
    for (const auto& a : agents) positions.push_back(a.true_pose.position);
    dispersion_samples.push_back(std::move(positions));
  }

  result.scenario = scenario;
  result.collective = control.collective().landmarks();
  result.observations = control.observations().landmarks();
  result.explored = explored_mask;

  GridParams gp;
  gp.semantics.alpha = config.alpha;
  gp.threshold = config.grid_threshold;
  gp.sparsity_floor = config.sparsity_floor;
  gp.max_depth = config.max_depth;
  result.grid = grid_segment(result.collective, bounds, ontology, gp);

  BranchParams bp;
  bp.semantics.alpha = config.alpha;
  bp.seed_position = config.nnn_seed.value_or(bounds.centre());
  bp.momentum = config.nnn_momentum;
  bp.adjacency_distance = config.adjacency_distance;
  bp.max_trade_rounds = config.max_trade_rounds;
  result.branch = branch_segment(result.collective, ontology, bp);

  result.truth = ground_truth_grid(scenario);
  result.pred_grid = rasterize(result.grid);
  result.pred_branch = rasterize(result.branch.fragments, result.collective, bounds);

  report.scenario = scenario.name;
  report.seed = config.seed;
  report.agents = n;
  report.feature_count = scenario.features.size();
  report.static_feature_count = static_ids.size();
  report.landmark_count = result.collective.size();
  report.all_discovered = discovered_all();
  report.steps = step;
  report.elapsed_seconds = static_cast<double>(step) * kStepSeconds;
  report.coverage = area_coverage(config.motion.speed, config.sensor.sweep_width(),
                                  report.elapsed_seconds, n, scenario.area(),
                                  tracker.tracked_ratio());
  report.dispersion = dispersion(dispersion_samples, bounds);
  report.er_final = report.er_series.empty() ? 0.0 : report.er_series.back();

  std::vector<Feature> static_features;
  for (const auto& f : scenario.features)
    if (f.is_static) static_features.push_back(f);
  report.topology = topology_match(result.collective, static_features, ontology, config.match_radius);

  const auto score = [&](const LabelGrid& pred, MethodScores& out, std::map<std::string, double>& per) {
    out.macro_iou = macro_iou(pred, result.truth);
    const ApSummary ap = precision_recall_ap(pred, result.truth);
    out.mean_ap = ap.mean_ap;
    out.micro_ap = ap.micro_ap;
    out.explored_accuracy = explored_accuracy(pred, result.truth, explored_mask);
    per = iou_per_label(pred, result.truth);
  };
  score(result.pred_grid, report.grid, report.grid_iou);
  score(result.pred_branch, report.branch, report.branch_iou);
  return result;
}

std::vector<BatchRow> run_batch(const std::vector<TrialConfig>& configs, int threads) {
  if (configs.empty()) throw InvalidArgument("batch needs at least one config");
  std::vector<BatchRow> rows(configs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        rows[i].report = run_trial(configs[i]).report;
        rows[i].ok = true;
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
    }
  };
  const int count = std::clamp(threads, 1, static_cast<int>(configs.size()));
  if (count == 1) {
    worker();
    return rows;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return rows;
}

std::vector<TrialConfig> expand_sweep(const TrialConfig& base, std::string_view sweep_json) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(sweep_json);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("sweep: ") + e.what());
  }
  reject_unknown_keys(doc, {"density", "seed", "sigma_drift", "agents", "alpha", "grid_threshold",
                            "sparsity_floor"},
                      "sweep");
  std::vector<TrialConfig> out{base};
  for (const auto& [key, values] : doc.items()) {
    if (!values.is_array() || values.empty())
      throw ParseError("sweep: '" + key + "' must be a non-empty array");
    std::vector<TrialConfig> next;
    for (const auto& cfg : out)
      for (const auto& v : values) {
        TrialConfig c = cfg;
        try {
          if (key == "density") {
            if (!c.generator) throw InvalidArgument("density sweep needs a generator config");
            c.generator->densities = {v.get<double>()};
          } else if (key == "seed") {
            const bool follow = c.generator && c.generator->seed == c.seed;
            c.seed = v.get<std::uint64_t>();
            if (follow) c.generator->seed = c.seed;
          } else if (key == "sigma_drift") {
            c.motion.sigma_drift = v.get<double>();
          } else if (key == "agents") {
            c.agent_count = v.get<int>();
            if (c.generator) c.generator->agent_count = c.agent_count;
          } else if (key == "alpha") {
            c.alpha = v.get<double>();
          } else if (key == "grid_threshold") {
            c.grid_threshold = v.get<double>();
          } else {
            c.sparsity_floor = v.get<int>();
          }
        } catch (const ordered_json::exception& e) {
          throw ParseError("sweep: " + key + ": " + e.what());
        }
        next.push_back(std::move(c));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace ctxslam
