// Command-line front end: demonstration generation, model training, movement
// synthesis, and the experiment suites with CSV/SVG outputs and verdict files.
//
// Exit codes: 0 ok, 1 acceptance failure, 2 config error, 3 numerical error.

#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tplearn/io.hpp"
#include "tplearn/operators.hpp"
#include "tplearn/priority.hpp"
#include "tplearn/sim.hpp"
#include "tplearn/svg.hpp"
#include "tplearn/tpgmm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tpl;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string robot = "bimanual5";
  std::string kind = "priority";  // priority | spaces
  std::string side = "left";
  int k = 1;
  std::uint64_t seed = 1;
  double dt = 0.01;
  double horizon = 20.0;
  int n_demos = 1;
  double demo_gain = 80.0;
  double gain = 4.0;
  double damping = 1e-6;
  Eigen::Vector2d conflict_left{-1.25, 0.55};
  Eigen::Vector2d conflict_right{1.25, 0.55};
  Eigen::Vector2d feasible_left{-0.75, 0.9};
  Eigen::Vector2d feasible_right{0.75, 0.9};
  double sweep_start = 3.0;
  double sweep_end = 17.0;
  double synthesis_horizon = 10.0;
  int weight_points = 101;
  double pair_duration = 5.0;
  double y_ref = 1.1;
  double y_ref_feasible = 0.8;
  double angle_ref = -1.5707963267948966;
  int spaces_k = 25;
  SpacesDemoOptions spaces;
  std::string out = "out";
  std::string model_path;
};

Eigen::Vector2d vec2_from(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError("config field '" + field + "' must be a 2-element array");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg;
  if (path.empty()) return cfg;
  json j;
  try {
    j = read_json(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (j.contains("robot")) cfg.robot = j["robot"].get<std::string>();
  if (j.contains("kind")) cfg.kind = j["kind"].get<std::string>();
  if (j.contains("side")) cfg.side = j["side"].get<std::string>();
  if (j.contains("k")) cfg.k = j["k"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("dt")) cfg.dt = j["dt"].get<double>();
  if (j.contains("horizon")) cfg.horizon = j["horizon"].get<double>();
  if (j.contains("n_demos")) cfg.n_demos = j["n_demos"].get<int>();
  if (j.contains("demo_gain")) cfg.demo_gain = j["demo_gain"].get<double>();
  if (j.contains("gain")) cfg.gain = j["gain"].get<double>();
  if (j.contains("damping")) cfg.damping = j["damping"].get<double>();
  if (j.contains("conflict_targets")) {
    cfg.conflict_left = vec2_from(j["conflict_targets"].at("left"), "conflict_targets.left");
    cfg.conflict_right = vec2_from(j["conflict_targets"].at("right"), "conflict_targets.right");
  }
  if (j.contains("feasible_targets")) {
    cfg.feasible_left = vec2_from(j["feasible_targets"].at("left"), "feasible_targets.left");
    cfg.feasible_right = vec2_from(j["feasible_targets"].at("right"), "feasible_targets.right");
  }
  if (j.contains("sweep")) {
    cfg.sweep_start = j["sweep"][0].get<double>();
    cfg.sweep_end = j["sweep"][1].get<double>();
  }
  if (j.contains("synthesis_horizon")) cfg.synthesis_horizon = j["synthesis_horizon"].get<double>();
  if (j.contains("weight_points")) cfg.weight_points = j["weight_points"].get<int>();
  if (j.contains("pair_duration")) cfg.pair_duration = j["pair_duration"].get<double>();
  if (j.contains("y_ref")) cfg.y_ref = j["y_ref"].get<double>();
  if (j.contains("y_ref_feasible")) cfg.y_ref_feasible = j["y_ref_feasible"].get<double>();
  if (j.contains("angle_ref")) cfg.angle_ref = j["angle_ref"].get<double>();
  if (j.contains("spaces_k")) cfg.spaces_k = j["spaces_k"].get<int>();
  if (j.contains("spaces")) {
    const json& s = j["spaces"];
    if (s.contains("n_demos")) cfg.spaces.n_demos = s["n_demos"].get<int>();
    if (s.contains("joint_noise")) cfg.spaces.joint_noise = s["joint_noise"].get<double>();
    if (s.contains("osc_amplitude")) cfg.spaces.osc_amplitude = s["osc_amplitude"].get<double>();
    if (s.contains("osc_freq")) cfg.spaces.osc_freq = s["osc_freq"].get<double>();
    if (s.contains("object_nominal")) {
      for (int i = 0; i < 3; ++i) cfg.spaces.object_nominal(i) = s["object_nominal"][i].get<double>();
    }
    if (s.contains("object_spread")) {
      for (int i = 0; i < 3; ++i) cfg.spaces.object_spread(i) = s["object_spread"][i].get<double>();
    }
  }
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  if (j.contains("model")) cfg.model_path = j["model"].get<std::string>();

  if (cfg.kind != "priority" && cfg.kind != "spaces") {
    throw ConfigError("config field 'kind' must be 'priority' or 'spaces'");
  }
  if (cfg.side != "left" && cfg.side != "right") {
    throw ConfigError("config field 'side' must be 'left' or 'right'");
  }
  if (cfg.k < 1) {
    throw ConfigError("config field 'k' must be >= 1");
  }
  try {
    preset(cfg.robot);
  } catch (const std::exception&) {
    throw ConfigError("config field 'robot' names an unknown preset: " + cfg.robot);
  }
  return cfg;
}

std::vector<Hierarchy> bimanual_candidates() {
  return {Hierarchy{{0, 1}, "left_first"}, Hierarchy{{1, 0}, "right_first"}};
}

Hierarchy side_hierarchy(const std::string& side) {
  return side == "left" ? Hierarchy{{0, 1}, "left_first"} : Hierarchy{{1, 0}, "right_first"};
}

struct Criterion {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string cmp = "<";
  bool pass = false;
};

Criterion check_lt(const std::string& name, double value, double threshold) {
  return {name, value, threshold, "<", value < threshold};
}

Criterion check_true(const std::string& name, bool ok) {
  return {name, ok ? 1.0 : 0.0, 1.0, "==", ok};
}

bool write_verdict(const std::string& path, const std::string& suite,
                   const std::vector<Criterion>& criteria) {
  bool all = true;
  json arr = json::array();
  for (const auto& c : criteria) {
    all = all && c.pass;
    arr.push_back({{"name", c.name},
                   {"pass", c.pass},
                   {"value", c.value},
                   {"threshold", c.threshold},
                   {"comparator", c.cmp}});
    std::cout << (c.pass ? "[pass] " : "[FAIL] ") << suite << ": " << c.name << " (value "
              << c.value << ", threshold " << c.cmp << " " << c.threshold << ")\n";
  }
  write_json(path, json{{"suite", suite}, {"pass", all}, {"criteria", arr}});
  return all;
}

std::string demo_path(const std::string& dir, const std::string& side, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "demo_%s_%03d.csv", side.c_str(), index);
  return (fs::path(dir) / buf).string();
}

// ---------------------------------------------------------------------------
// demo / train / synth pipelines

PriorityDemoResult make_priority_demos(const ExperimentConfig& cfg, const std::string& side) {
  const RobotPreset robot = preset(cfg.robot);
  const ReferenceProgram program = bimanual_sweep_program(
      robot, cfg.horizon, cfg.conflict_left, cfg.conflict_right, cfg.sweep_start, cfg.sweep_end);
  PriorityDemoOptions opts;
  opts.dt = cfg.dt;
  opts.gain = cfg.demo_gain;
  opts.damping = cfg.damping;
  opts.n_demos = cfg.n_demos;
  opts.seed = cfg.seed;
  return generate_priority_demos(robot, side_hierarchy(side), program,
                                 bimanual_position_observer(robot.chain), opts);
}

int cmd_demo(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  if (cfg.kind == "priority") {
    const PriorityDemoResult result = make_priority_demos(cfg, cfg.side);
    for (size_t i = 0; i < result.demos.size(); ++i) {
      write_demo_csv(demo_path(cfg.out, cfg.side, static_cast<int>(i)), result.demos[i]);
    }
    std::cout << "wrote " << result.demos.size() << " " << cfg.side << "-priority demo(s), "
              << result.demos.front().length() << " steps each\n";
    if (!result.conflict_observed) {
      std::cout << "warning: no conflict phase observed; the priority model will be "
                   "uninformative\n";
    }
    const std::vector<Hierarchy> candidates = bimanual_candidates();
    const std::vector<Eigen::MatrixXd> proj =
        project_demo(result.demos.front(), candidates, cfg.damping);
    for (size_t j = 0; j < proj.size(); ++j) {
      const Eigen::RowVectorXd mean = proj[j].colwise().mean();
      const Eigen::RowVectorXd var =
          (proj[j].rowwise() - mean).array().square().colwise().mean();
      std::cout << "  projection variance [" << candidates[j].label << "]: " << var << "\n";
    }
  } else {
    SpacesDemoOptions opts = cfg.spaces;
    opts.dt = cfg.dt;
    opts.seed = cfg.seed;
    const SpacesDemoResult result = generate_spaces_demos(preset(cfg.robot), opts);
    for (size_t i = 0; i < result.demos.size(); ++i) {
      write_demo_csv(demo_path(cfg.out, "spaces", static_cast<int>(i)), result.demos[i]);
    }
    std::cout << "wrote " << result.demos.size() << " reach-then-oscillate demo(s)\n";
    if (!result.sufficient_for_covariance) {
      std::cout << "warning: a single demo cannot support covariance estimation\n";
    }
    if (result.object_spread_degenerate) {
      std::cout << "warning: zero object spread leaves both candidate spaces tight "
                   "(model ambiguity)\n";
    }
    if (result.demos.size() >= 2) {
      const SpacesVarianceReport rep = spaces_variance_report(result.demos, opts);
      std::cout << "  reach-end object-frame EE variance: " << rep.reach_end_object_var
                << "\n  oscillation joint-1 variance: " << rep.osc_joint1_var
                << "\n  reach config variance: " << rep.reach_config_var
                << "\n  oscillation object-frame variance: " << rep.osc_object_var << "\n";
    }
  }
  return 0;
}

std::vector<Demonstration> load_demos(const ExperimentConfig& cfg, const std::string& side) {
  std::vector<Demonstration> demos;
  for (int i = 0;; ++i) {
    const std::string path = demo_path(cfg.out, side, i);
    if (!fs::exists(path)) break;
    demos.push_back(read_demo_csv(path));
  }
  if (demos.empty()) {
    throw ConfigError("no demo files found under '" + cfg.out + "' (run `demo` first)");
  }
  return demos;
}

int cmd_train(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  if (cfg.kind == "priority") {
    const std::vector<Demonstration> demos = load_demos(cfg, cfg.side);
    const PriorityModel model =
        fit_priority_model(demos, bimanual_candidates(), cfg.k, cfg.damping, cfg.seed);
    write_json((fs::path(cfg.out) / "model.json").string(), priority_model_to_json(model));
    std::cout << "trained priority model (K=" << cfg.k << ", P=" << model.hierarchies.size()
              << ") -> " << cfg.out << "/model.json\n";
  } else {
    const std::vector<Demonstration> demos = load_demos(cfg, "spaces");
    const TpgmmFit fit = fit_spaces_model(demos, cfg.spaces_k, cfg.seed);
    write_json((fs::path(cfg.out) / "model.json").string(), tpgmm_to_json(fit.model));
    Eigen::MatrixXd trace(fit.loglik_trace.size(), 1);
    for (size_t i = 0; i < fit.loglik_trace.size(); ++i) trace(i, 0) = fit.loglik_trace[i];
    write_csv((fs::path(cfg.out) / "training_log.csv").string(), {"loglik"}, trace);
    std::cout << "trained two-frame model (K=" << cfg.spaces_k << ", "
              << fit.loglik_trace.size() << " EM iterations) -> " << cfg.out
              << "/model.json\n";
  }
  return 0;
}

Eigen::MatrixXd priority_trace_table(const PriorityTrace& trace) {
  const int n = static_cast<int>(trace.times.size());
  Eigen::MatrixXd table(
      n, 1 + trace.q.cols() + trace.task_error.cols() + trace.gamma_trace.cols());
  table.col(0) = trace.times;
  table.middleCols(1, trace.q.cols()) = trace.q;
  table.middleCols(1 + trace.q.cols(), trace.task_error.cols()) = trace.task_error;
  table.rightCols(trace.gamma_trace.cols()) = trace.gamma_trace;
  return table;
}

std::vector<std::string> priority_trace_header(int nq, int n_tasks, int P) {
  std::vector<std::string> h{"t"};
  for (int i = 0; i < nq; ++i) h.push_back("q_" + std::to_string(i));
  for (int i = 0; i < n_tasks; ++i) h.push_back("err_" + std::to_string(i));
  for (int i = 0; i < P; ++i) h.push_back("trgamma_" + std::to_string(i));
  return h;
}

PriorityTrace run_priority_synthesis(const PriorityModel& model, const RobotPreset& robot,
                                     const Eigen::Vector2d& left, const Eigen::Vector2d& right,
                                     const ExperimentConfig& cfg) {
  PrioritySynthesisOptions opts;
  opts.dt = cfg.dt;
  opts.steps = static_cast<int>(std::lround(cfg.synthesis_horizon / cfg.dt));
  opts.gain = cfg.gain;
  opts.damping = cfg.damping;
  ReferenceProvider refs = [left, right](double) {
    return std::vector<Eigen::VectorXd>{left, right};
  };
  return synthesize_priority(model, bimanual_position_observer(robot.chain), refs,
                             robot.q_init, opts);
}

int cmd_synth(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  const std::string model_file =
      cfg.model_path.empty() ? (fs::path(cfg.out) / "model.json").string() : cfg.model_path;
  if (cfg.kind == "priority") {
    const PriorityModel model = priority_model_from_json(read_json(model_file));
    const RobotPreset robot = preset(cfg.robot);
    const PriorityTrace trace =
        run_priority_synthesis(model, robot, cfg.conflict_left, cfg.conflict_right, cfg);
    write_csv((fs::path(cfg.out) / "trajectory.csv").string(),
              priority_trace_header(robot.chain.dof(), 2, model.model.num_frames()),
              priority_trace_table(trace));
    std::cout << "synthesized " << trace.times.size() << " steps -> " << cfg.out
              << "/trajectory.csv\n";
  } else {
    const TpGmm model = tpgmm_from_json(read_json(model_file));
    const RobotPreset robot = preset(cfg.robot);
    SpacesDemoOptions sopts = cfg.spaces;
    sopts.dt = cfg.dt;
    sopts.seed = cfg.seed + 1;  // a new situation, not a training pose
    sopts.n_demos = 1;
    const SpacesDemoResult probe = generate_spaces_demos(robot, sopts);
    const Eigen::Vector3d object = probe.demos.front().object_pose;
    const Eigen::VectorXd q0 = probe.demos.front().joints.row(0).transpose();
    const int steps = probe.demos.front().length();
    const SpacesReproduceResult rep = reproduce_spaces(model, robot, object, q0, cfg.dt, steps);
    const int nq = robot.chain.dof();
    Eigen::MatrixXd table(steps, 1 + nq + 2);
    table.col(0) = rep.trace.times;
    table.middleCols(1, nq) = rep.trace.reference;
    table.rightCols(2) = rep.ee;
    std::vector<std::string> header{"t"};
    for (int i = 0; i < nq; ++i) header.push_back("q_" + std::to_string(i));
    header.push_back("x_0");
    header.push_back("x_1");
    write_csv((fs::path(cfg.out) / "reproduction.csv").string(), header, table);
    std::cout << "reproduced " << steps << " steps for object [" << object.transpose()
              << "] -> " << cfg.out << "/reproduction.csv\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// experiment suites

void write_transition_outputs(const std::string& dir, const std::string& tag,
                              const TransitionStudyResult& study) {
  const int n = static_cast<int>(study.weights.rows());
  Eigen::MatrixXd table(n, 4);
  table.leftCols(2) = study.weights;
  table.rightCols(2) = study.errors;
  write_csv((fs::path(dir) / (tag + "_errors.csv")).string(),
            {"w_orient", "w_pos", "err_orient", "err_pos"}, table);

  SvgPlot plot("End-effector error versus hierarchy weights", "w_pos", "error");
  plot.add_line(study.weights.col(1), study.errors.col(0), "#c22");
  plot.add_line(study.weights.col(1), study.errors.col(1), "#26c");
  plot.add_legend_entry("orientation error", "#c22");
  plot.add_legend_entry("vertical position error", "#26c");
  plot.write((fs::path(dir) / (tag + "_errors.svg")).string());
}

int exp_transitions(const ExperimentConfig& cfg, bool feasible) {
  fs::create_directories(cfg.out);
  const RobotPreset robot = preset(cfg.robot == "bimanual5" ? "planar3" : cfg.robot);
  TransitionStudyOptions opts;
  opts.weight_points = cfg.weight_points;
  opts.pair_duration = cfg.pair_duration;
  opts.dt = cfg.dt;
  opts.damping = cfg.damping;
  opts.y_ref = feasible ? cfg.y_ref_feasible : cfg.y_ref;
  opts.angle_ref = cfg.angle_ref;
  const TransitionStudyResult study = run_transition_study(robot, opts);
  const std::string tag = feasible ? "feasible" : "transitions";
  write_transition_outputs(cfg.out, tag, study);

  std::vector<Criterion> criteria;
  if (feasible) {
    criteria.push_back(check_lt("max orientation error over all weight pairs",
                                study.errors.col(0).maxCoeff(), 1e-3));
    criteria.push_back(check_lt("max position error over all weight pairs",
                                study.errors.col(1).maxCoeff(), 1e-3));
  } else {
    criteria.push_back(check_lt("orientation error at weights (1,0)", study.errors(0, 0), 1e-3));
    criteria.push_back(check_lt("position error at weights (0,1)",
                                study.errors(study.errors.rows() - 1, 1), 1e-3));
    double max_jump = 0.0;
    for (int i = 1; i < study.errors.rows(); ++i) {
      max_jump = std::max(
          max_jump, (study.errors.row(i) - study.errors.row(i - 1)).cwiseAbs().maxCoeff());
    }
    criteria.push_back(check_lt("max consecutive error jump", max_jump, 0.05));
  }
  return write_verdict((fs::path(cfg.out) / ("verdict_" + tag + ".json")).string(), tag,
                       criteria)
             ? 0
             : 1;
}

struct SideResult {
  std::vector<Criterion> criteria;
  PriorityModel model;
};

SideResult run_priority_side(const ExperimentConfig& cfg, const std::string& side) {
  const RobotPreset robot = preset(cfg.robot);
  const PriorityDemoResult demo = make_priority_demos(cfg, side);
  const std::vector<Hierarchy> candidates = bimanual_candidates();
  const std::vector<Eigen::MatrixXd> proj =
      project_demo(demo.demos.front(), candidates, cfg.damping);
  const int tight = side == "left" ? 0 : 1;
  const int loose = 1 - tight;

  Eigen::VectorXd var_tight, var_loose;
  for (int j : {tight, loose}) {
    const Eigen::RowVectorXd mean = proj[j].colwise().mean();
    const Eigen::VectorXd var =
        (proj[j].rowwise() - mean).array().square().colwise().mean().transpose();
    (j == tight ? var_tight : var_loose) = var;
  }
  const double ratio = (var_tight.array() / var_loose.array()).maxCoeff();

  SideResult result;
  result.criteria.push_back(
      check_true(side + ": demonstration shows a conflict phase", demo.conflict_observed));
  result.criteria.push_back(
      check_lt(side + ": per-dimension variance ratio demonstrated/other", ratio, 1e-2));

  // Scatter of projected datapoints (per-hand block norms) with the paper-style
  // tight cluster for the demonstrated hierarchy.
  SvgPlot scatter("Projected task velocities per candidate hierarchy (" + side + ")",
                  "|left-hand block|", "|right-hand block|");
  const char* colors[2] = {"#c22", "#26c"};
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd xs(proj[j].rows()), ys(proj[j].rows());
    for (int t = 0; t < proj[j].rows(); ++t) {
      xs(t) = proj[j].row(t).head(2).norm();
      ys(t) = proj[j].row(t).tail(2).norm();
    }
    scatter.add_scatter(xs, ys, colors[j], 1.5);
    scatter.add_legend_entry(candidates[j].label, colors[j]);
  }
  scatter.write((fs::path(cfg.out) / ("priority_scatter_" + side + ".svg")).string());

  result.model = fit_priority_model(demo.demos, candidates, cfg.k, cfg.damping, cfg.seed);

  const PriorityTrace conflict =
      run_priority_synthesis(result.model, robot, cfg.conflict_left, cfg.conflict_right, cfg);
  const int last = static_cast<int>(conflict.times.size());
  const int steady = last - static_cast<int>(std::lround(1.0 / cfg.dt));
  const int top_task = side == "left" ? 0 : 1;
  const double top_err =
      conflict.task_error.col(top_task).segment(steady, last - steady).maxCoeff();
  result.criteria.push_back(
      check_lt(side + ": steady-state error under conflicting targets", top_err, 1e-3));

  const BimanualReachability conflict_reach =
      bimanual_reachability(robot.chain, cfg.conflict_left, cfg.conflict_right);
  result.criteria.push_back(check_true(
      side + ": sweep confirms conflict targets are not jointly reachable",
      !conflict_reach.both));

  const PriorityTrace feas =
      run_priority_synthesis(result.model, robot, cfg.feasible_left, cfg.feasible_right, cfg);
  const BimanualReachability feas_reach =
      bimanual_reachability(robot.chain, cfg.feasible_left, cfg.feasible_right);
  result.criteria.push_back(check_true(
      side + ": sweep confirms feasible targets are jointly reachable", feas_reach.both));
  const double feas_err = feas.task_error.middleRows(steady, last - steady).maxCoeff();
  result.criteria.push_back(
      check_lt(side + ": both errors with jointly reachable targets", feas_err, 1e-3));

  write_csv((fs::path(cfg.out) / ("priority_conflict_" + side + ".csv")).string(),
            priority_trace_header(robot.chain.dof(), 2, 2), priority_trace_table(conflict));
  write_csv((fs::path(cfg.out) / ("priority_feasible_" + side + ".csv")).string(),
            priority_trace_header(robot.chain.dof(), 2, 2), priority_trace_table(feas));

  SvgPlot weights("Hierarchy precision traces (" + side + "-priority model)", "t [s]",
                  "log10 tr(Gamma)");
  weights.add_line(conflict.times, conflict.gamma_trace.col(0).array().log10().matrix(), "#c22");
  weights.add_line(conflict.times, conflict.gamma_trace.col(1).array().log10().matrix(), "#26c");
  weights.add_legend_entry("left_first", "#c22");
  weights.add_legend_entry("right_first", "#26c");
  weights.write((fs::path(cfg.out) / ("priority_weights_" + side + ".svg")).string());
  return result;
}

int exp_priority(const ExperimentConfig& cfg, int jobs) {
  fs::create_directories(cfg.out);
  std::vector<Criterion> criteria;
  if (jobs > 1) {
    auto left = std::async(std::launch::async, run_priority_side, cfg, std::string("left"));
    auto right = std::async(std::launch::async, run_priority_side, cfg, std::string("right"));
    for (auto* f : {&left, &right}) {
      const SideResult r = f->get();
      criteria.insert(criteria.end(), r.criteria.begin(), r.criteria.end());
    }
  } else {
    for (const char* side : {"left", "right"}) {
      const SideResult r = run_priority_side(cfg, side);
      criteria.insert(criteria.end(), r.criteria.begin(), r.criteria.end());
    }
  }
  return write_verdict((fs::path(cfg.out) / "verdict_priority.json").string(), "priority",
                       criteria)
             ? 0
             : 1;
}

int exp_transfer(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  const SideResult trained = run_priority_side(cfg, "left");  // trains on cfg.robot
  const RobotPreset target = preset("bimanual7");
  const PriorityTrace trace =
      run_priority_synthesis(trained.model, target, cfg.conflict_left, cfg.conflict_right, cfg);
  const int last = static_cast<int>(trace.times.size());
  const int steady = last - static_cast<int>(std::lround(1.0 / cfg.dt));

  std::vector<Criterion> criteria;
  const BimanualReachability reach =
      bimanual_reachability(target.chain, cfg.conflict_left, cfg.conflict_right);
  criteria.push_back(
      check_true("conflict persists on the target robot (reachability sweep)", !reach.both));
  criteria.push_back(
      check_lt("left steady-state error on the target robot under conflict",
               trace.task_error.col(0).segment(steady, last - steady).maxCoeff(), 1e-3));
  write_csv((fs::path(cfg.out) / "transfer_conflict.csv").string(),
            priority_trace_header(target.chain.dof(), 2, 2), priority_trace_table(trace));
  return write_verdict((fs::path(cfg.out) / "verdict_transfer.json").string(), "transfer",
                       criteria)
             ? 0
             : 1;
}

int exp_spaces(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  const RobotPreset robot = preset(cfg.robot == "bimanual5" ? "planar3" : cfg.robot);
  SpacesDemoOptions opts = cfg.spaces;
  opts.dt = cfg.dt;
  opts.seed = cfg.seed;
  const SpacesDemoResult demos = generate_spaces_demos(robot, opts);
  const SpacesVarianceReport rep = spaces_variance_report(demos.demos, opts);

  std::vector<Criterion> criteria;
  criteria.push_back(
      check_lt("reach-end object-frame EE variance", rep.reach_end_object_var, 1e-4));
  criteria.push_back(check_lt("oscillation joint-1 variance", rep.osc_joint1_var, 1e-4));
  criteria.push_back(check_true("complementary-space variances exceed 1e-2",
                                rep.reach_config_var >= 1e-2 && rep.osc_object_var >= 1e-2));

  const TpgmmFit fit = fit_spaces_model(demos.demos, cfg.spaces_k, cfg.seed);

  SpacesDemoOptions probe_opts = opts;
  probe_opts.seed = cfg.seed + 101;
  probe_opts.n_demos = 1;
  const SpacesDemoResult probe = generate_spaces_demos(robot, probe_opts);
  const Eigen::Vector3d object = probe.demos.front().object_pose;
  const Eigen::VectorXd q0 = probe.demos.front().joints.row(0).transpose();
  const int steps = probe.demos.front().length();
  const SpacesReproduceResult repd = reproduce_spaces(fit.model, robot, object, q0, cfg.dt, steps);

  const int reach_end = static_cast<int>(std::lround(opts.reach_duration / cfg.dt));
  const int osc_begin =
      static_cast<int>(std::lround((opts.reach_duration + opts.blend_duration) / cfg.dt));

  double reach_sq = 0.0;
  for (int t = 0; t < reach_end; ++t) {
    reach_sq += (repd.ee.row(t) - repd.frame_ee[0].row(t)).squaredNorm();
  }
  const double reach_rmse = std::sqrt(reach_sq / reach_end);
  double osc_sq = 0.0;
  for (int t = osc_begin; t < steps; ++t) {
    const double d = repd.trace.reference(t, 0) - repd.trace.frame_reference[1](t, 0);
    osc_sq += d * d;
  }
  const double osc_rmse = std::sqrt(osc_sq / (steps - osc_begin));

  criteria.push_back(
      check_lt("reach-phase EE RMSE versus object-frame candidate", reach_rmse, 0.01));
  criteria.push_back(
      check_lt("oscillation joint-1 RMSE versus canonical candidate", osc_rmse, 0.05));
  const double grasp_err = (repd.ee.row(reach_end - 1).transpose() - object.head<2>()).norm();
  criteria.push_back(check_lt("EE error at grasp time for a new object pose", grasp_err, 1e-2));

  double reach_obj_var = 0.0, reach_cfg_var = 0.0, osc_obj_var = 0.0, osc_cfg_var = 0.0;
  for (int t = 0; t < reach_end; ++t) {
    reach_obj_var += repd.trace.frame_variance[0](t, 0);
    reach_cfg_var += repd.trace.frame_variance[1](t, 0);
  }
  for (int t = osc_begin; t < steps; ++t) {
    osc_obj_var += repd.trace.frame_variance[0](t, 0);
    osc_cfg_var += repd.trace.frame_variance[1](t, 0);
  }
  criteria.push_back(
      check_true("joint-1 variance ordering flips between phases",
                 reach_obj_var < reach_cfg_var && osc_cfg_var < osc_obj_var));

  // Candidate-versus-combined joint-1 traces with variance envelopes.
  SvgPlot plot("Joint-1 reference from each candidate space", "t [s]", "q1 [rad]");
  const Eigen::VectorXd& t = repd.trace.times;
  for (int j = 0; j < 2; ++j) {
    const Eigen::VectorXd mean = repd.trace.frame_reference[j].col(0);
    const Eigen::VectorXd sd = repd.trace.frame_variance[j].col(0).cwiseSqrt();
    const char* color = j == 0 ? "#c22" : "#2a2";
    plot.add_band(t, mean - sd, mean + sd, color);
    plot.add_line(t, mean, color);
  }
  plot.add_line(t, repd.trace.reference.col(0), "#111", 2.0);
  plot.add_legend_entry("object-frame candidate", "#c22");
  plot.add_legend_entry("configuration candidate", "#2a2");
  plot.add_legend_entry("combined reference", "#111");
  plot.write((fs::path(cfg.out) / "spaces_joint1.svg").string());

  const int nq = robot.chain.dof();
  Eigen::MatrixXd table(steps, 1 + 3 * nq + 2);
  table.col(0) = t;
  table.middleCols(1, nq) = repd.trace.reference;
  table.middleCols(1 + nq, nq) = repd.trace.frame_reference[0];
  table.middleCols(1 + 2 * nq, nq) = repd.trace.frame_reference[1];
  table.rightCols(2) = repd.ee;
  std::vector<std::string> header{"t"};
  for (const char* tag : {"ref_q", "obj_q", "cfg_q"}) {
    for (int i = 0; i < nq; ++i) header.push_back(std::string(tag) + std::to_string(i));
  }
  header.push_back("x_0");
  header.push_back("x_1");
  write_csv((fs::path(cfg.out) / "spaces_reproduction.csv").string(), header, table);

  return write_verdict((fs::path(cfg.out) / "verdict_spaces.json").string(), "spaces",
                       criteria)
             ? 0
             : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning space and priority constraints from robot demonstrations"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path, out_override;
  long long seed_override = -1;
  int jobs = 1;
  app.add_option("--config", config_path, "experiment config JSON");
  app.add_option("--out", out_override, "output directory override");
  app.add_option("--seed", seed_override, "seed override");
  app.add_option("--jobs", jobs, "parallel independent runs");

  CLI::App* demo = app.add_subcommand("demo", "generate demonstration CSV files");
  CLI::App* train = app.add_subcommand("train", "fit a model from demos");
  CLI::App* synth = app.add_subcommand("synth", "synthesize motion from a model");
  CLI::App* exp = app.add_subcommand("exp", "run an experiment suite");
  std::string suite;
  exp->add_option("suite", suite, "transitions|feasible|priority|transfer|spaces")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.out = out_override;
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);

    if (demo->parsed()) return cmd_demo(cfg);
    if (train->parsed()) return cmd_train(cfg);
    if (synth->parsed()) return cmd_synth(cfg);
    if (exp->parsed()) {
      if (suite == "transitions") return exp_transitions(cfg, false);
      if (suite == "feasible") return exp_transitions(cfg, true);
      if (suite == "priority") return exp_priority(cfg, jobs);
      if (suite == "transfer") return exp_transfer(cfg);
      if (suite == "spaces") return exp_spaces(cfg);
      throw ConfigError("unknown suite '" + suite + "'");
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
