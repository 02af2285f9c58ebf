#include "vpr/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "vpr/experiment.hpp"
#include "vpr/inference.hpp"
#include "vpr/io.hpp"
#include "vpr/map_model.hpp"
#include "vpr/oracle.hpp"
#include "vpr/sensor_model.hpp"
#include "vpr/stochastic.hpp"

namespace vpr {
namespace {

struct Method {
  bool filter = true;
  bool smoother = true;
};

Method parse_method(const std::string& s) {
  if (s == "filter") return {true, false};
  if (s == "smoother") return {false, true};
  return {true, true};
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

/// Writes to `path`, or to `out` when path is "-".
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
  } else {
    write_text_file(path, content);
  }
}

int cmd_validate_map(const std::string& path, std::ostream& out) {
  const RoadGraph graph = load_map_source(path);
  // Build without the constructor's check so the deviation can be reported.
  const int m = graph.num_nodes();
  Eigen::VectorXd totals = Eigen::VectorXd::Zero(m);
  for (const Edge& e : graph.edges()) totals[e.from - 1] += e.weight;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (const Edge& e : graph.edges()) a(e.to - 1, e.from - 1) = e.weight / totals[e.from - 1];

  const double deviation = max_column_deviation(a);
  std::size_t nonzero = 0;
  std::size_t self_loops = 0;
  std::size_t zero_weight_edges = 0;
  for (const Edge& e : graph.edges()) {
    if (e.weight > 0.0) {
      ++nonzero;
      self_loops += e.from == e.to;
    } else {
      ++zero_weight_edges;
    }
  }
  const std::size_t nnz_matrix = static_cast<std::size_t>((a.array() > 0.0).count());
  const bool stochastic = deviation <= kStochasticTolerance;
  const bool pattern_ok = nnz_matrix == nonzero;

  out << m << " nodes, " << graph.edges().size() << " edges, "
      << (stochastic ? "columns stochastic" : "columns NOT stochastic") << "\n";
  out << "max column deviation: " << deviation << "\n";
  out << "nonzero transitions: " << nnz_matrix << " of " << static_cast<long long>(m) * m
      << " (self-loops " << self_loops << ", zero-weight edges " << zero_weight_edges << ")\n";
  out << "zero pattern matches edges: " << (pattern_ok ? "yes" : "no") << "\n";
  return stochastic && pattern_ok ? kExitOk : kExitValidation;
}

struct SimulateOptions {
  std::string map = "default";
  NodeId init = 5;
  double sigma = 1.0;
  int steps = 50;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string method = "both";
  std::string out = "-";
  int threads = 1;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  const HmmModel model = build_model(load_map_source(o.map), NoiseSpec(o.sigma));
  ExperimentConfig config;
  config.initial_state = o.init;
  config.sigma = o.sigma;
  config.steps = o.steps;
  config.trials = o.trials;
  config.master_seed = o.seed;
  config.map_source = o.map;
  config.threads = o.threads;
  const auto outcomes = run_trials(model, config);
  const Method method = parse_method(o.method);

  std::ostringstream csv;
  write_results_csv(csv, outcomes, method.filter, method.smoother);
  emit(o.out, csv.str(), out);

  const ExperimentResult r = summarize(outcomes);
  std::ostream& summary = o.out == "-" ? err : out;
  summary << o.trials << " trials x " << o.steps << " steps:";
  if (method.filter) {
    summary << " filter mean accuracy " << fixed(r.filter_mean) << " (sd " << fixed(r.filter_std) << ")";
  }
  if (method.smoother) {
    summary << (method.filter ? ";" : "") << " smoother mean accuracy " << fixed(r.smoother_mean)
            << " (sd " << fixed(r.smoother_std) << ")";
  }
  summary << "\n";
  return kExitOk;
}

int cmd_replicate_table1(std::uint64_t seed, int trials, int threads, const std::string& csv_path,
                         std::ostream& out) {
  const auto rows = replicate_table1(seed, trials, threads);
  out << std::left << std::setw(28) << "scenario" << std::setw(20) << "filter (reference)"
      << std::setw(20) << "smoother (reference)" << "\n";
  std::ostringstream csv;
  csv << "scenario,initial_state,sigma,trials,filter_mean,filter_std,smoother_mean,smoother_std,"
         "reference_filter,reference_smoother\n";
  for (const auto& row : rows) {
    const auto& r = row.result;
    out << std::left << std::setw(28) << row.label
        << std::setw(20) << (fixed(r.filter_mean, 3) + " (" + fixed(row.reference_filter, 2) + ")")
        << std::setw(20) << (fixed(r.smoother_mean, 3) + " (" + fixed(row.reference_smoother, 2) + ")")
        << "\n";
    csv << '"' << row.label << '"' << ',' << row.initial_state << ',' << format_double(row.sigma) << ','
        << trials << ',' << format_double(r.filter_mean) << ',' << format_double(r.filter_std) << ','
        << format_double(r.smoother_mean) << ',' << format_double(r.smoother_std) << ','
        << format_double(row.reference_filter) << ',' << format_double(row.reference_smoother) << "\n";
  }
  if (!csv_path.empty()) emit(csv_path, csv.str(), out);
  return kExitOk;
}

int cmd_export_matrices(const std::string& map, double sigma, const std::string& format,
                        const std::string& prefix, std::ostream& out) {
  const HmmModel model = build_model(load_map_source(map), NoiseSpec(sigma));
  const bool pgm = format == "pgm";
  const std::string ext = pgm ? ".pgm" : ".csv";
  const std::pair<const char*, const Eigen::MatrixXd*> matrices[] = {
      {"transition", &model.transition.matrix()},
      {"confusion", &model.confusion.matrix()},
      {"observation", &model.observation.matrix()},
  };
  for (const auto& [name, m] : matrices) {
    const std::string path = prefix + "_" + name + ext;
    write_text_file(path, pgm ? matrix_to_pgm(*m) : matrix_to_csv(*m));
    out << "wrote " << path << " (" << m->rows() << "x" << m->cols() << ")\n";
  }
  out << "confusion diagonal mean " << fixed(model.confusion.matrix().diagonal().mean())
      << ", observation diagonal mean " << fixed(model.observation.matrix().diagonal().mean())
      << "\n";
  return kExitOk;
}

int cmd_infer(const std::string& map, double sigma, const std::string& measurements_path,
              std::optional<NodeId> init_state, const std::string& method_name,
              const std::string& out_path, std::ostream& out) {
  const HmmModel model = build_model(load_map_source(map), NoiseSpec(sigma));
  const auto measurements = parse_measurements(read_text_file(measurements_path), model.size());
  const InitialBelief initial = init_state ? InitialBelief::point_mass(model.size(), *init_state)
                                           : InitialBelief::uniform(model.size());
  const InferenceResult r = infer(model.transition, model.observation, measurements, initial);
  const Method method = parse_method(method_name);

  std::ostringstream csv;
  csv << "method,k,measured,estimate";
  for (int i = 1; i <= model.size(); ++i) csv << ",p" << i;
  csv << "\n";
  auto rows = [&](const char* name, const std::vector<BeliefVector>& beliefs) {
    for (std::size_t k = 0; k < beliefs.size(); ++k) {
      csv << name << ',' << k + 1 << ',' << measurements[k] << ',' << map_estimate(beliefs[k]);
      for (Eigen::Index i = 0; i < beliefs[k].size(); ++i) csv << ',' << format_double(beliefs[k][i]);
      csv << "\n";
    }
  };
  if (method.filter) rows("filter", r.filtered);
  if (method.smoother) rows("smoother", r.smoothed);
  emit(out_path, csv.str(), out);
  return kExitOk;
}

int cmd_verify(int instances, std::uint64_t seed, std::ostream& out) {
  OracleComparison worst;
  for (int n = 0; n < instances; ++n) {
    const std::uint64_t s = trial_seed(seed, static_cast<std::uint64_t>(n));
    const int m = 2 + static_cast<int>(s % 5);
    const int t = 1 + static_cast<int>((s >> 8) % 6);
    const auto cmp = compare_with_oracle(random_instance(s, m, t));
    worst.max_filtered_error = std::max(worst.max_filtered_error, cmp.max_filtered_error);
    worst.max_smoothed_error = std::max(worst.max_smoothed_error, cmp.max_smoothed_error);
    worst.evidence_relative_error = std::max(worst.evidence_relative_error, cmp.evidence_relative_error);
    worst.final_step_gap = std::max(worst.final_step_gap, cmp.final_step_gap);
  }
  const bool ok = worst.max_filtered_error <= 1e-9 && worst.max_smoothed_error <= 1e-9 &&
                  worst.evidence_relative_error <= 1e-9 && worst.final_step_gap <= 1e-12;
  out << instances << " random instances vs path enumeration: max filtered error "
      << worst.max_filtered_error << ", max smoothed error " << worst.max_smoothed_error
      << ", max evidence relative error " << worst.evidence_relative_error
      << ", final-step gap " << worst.final_step_gap << " -> " << (ok ? "OK" : "FAILED") << "\n";
  return ok ? kExitOk : kExitValidation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Road-graph HMM place recognition: simulation, filtering and smoothing"};
  app.require_subcommand(1);
  int code = kExitOk;

  auto* validate = app.add_subcommand("validate-map", "Check a map file and its transition matrix");
  std::string validate_path;
  validate->add_option("path", validate_path, "Map JSON file, or 'default'")->required();

  auto* generate = app.add_subcommand("generate-map", "Write the procedural default map as JSON");
  int gen_nodes = kDefaultMapNodes;
  std::uint64_t gen_seed = kDefaultMapSeed;
  std::string gen_out = "-";
  generate->add_option("--nodes", gen_nodes, "Number of nodes")->check(CLI::Range(2, 1'000'000));
  generate->add_option("--seed", gen_seed, "Weight seed");
  generate->add_option("--out", gen_out, "Output path ('-' for stdout)");

  auto* simulate = app.add_subcommand("simulate", "Sample trajectories and score filter/smoother");
  SimulateOptions sim;
  simulate->add_option("--map", sim.map, "Map JSON file, or 'default'");
  simulate->add_option("--init", sim.init, "Initial state x_0")->check(CLI::PositiveNumber);
  simulate->add_option("--sigma", sim.sigma, "Gaussian noise std-dev")->check(CLI::PositiveNumber);
  simulate->add_option("--steps", sim.steps, "Steps per trajectory")->check(CLI::PositiveNumber);
  simulate->add_option("--trials", sim.trials, "Number of trials")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--method", sim.method, "Methods to score")->check(CLI::IsMember({"filter", "smoother", "both"}));
  simulate->add_option("--out", sim.out, "Results CSV path ('-' for stdout)");
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  auto* table = app.add_subcommand("replicate-table1", "Run the three reference scenarios");
  std::uint64_t table_seed = 0;
  int table_trials = 500;
  int table_threads = 0;
  std::string table_out;
  table->add_option("--seed", table_seed, "Master seed");
  table->add_option("--trials", table_trials, "Trials per scenario")->check(CLI::PositiveNumber);
  table->add_option("--threads", table_threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  table->add_option("--out", table_out, "Optional CSV path");

  auto* export_cmd = app.add_subcommand("export-matrices", "Write transition/confusion/observation matrices");
  std::string exp_map = "default";
  double exp_sigma = 1.0;
  std::string exp_format = "csv";
  std::string exp_prefix = "vpr";
  export_cmd->add_option("--map", exp_map, "Map JSON file, or 'default'");
  export_cmd->add_option("--sigma", exp_sigma, "Gaussian noise std-dev")->check(CLI::PositiveNumber);
  export_cmd->add_option("--format", exp_format, "Output format")->check(CLI::IsMember({"csv", "pgm"}));
  export_cmd->add_option("--out-prefix", exp_prefix, "Files are <prefix>_<matrix>.<ext>");

  auto* infer_cmd = app.add_subcommand("infer", "Run filter/smoother on a measurement file");
  std::string inf_map = "default";
  double inf_sigma = 1.0;
  std::string inf_measurements;
  std::optional<NodeId> inf_init;
  std::string inf_method = "smoother";
  std::string inf_out = "-";
  infer_cmd->add_option("--map", inf_map, "Map JSON file, or 'default'");
  infer_cmd->add_option("--sigma", inf_sigma, "Gaussian noise std-dev")->check(CLI::PositiveNumber);
  infer_cmd->add_option("--measurements", inf_measurements, "One node id per line")->required();
  infer_cmd->add_option("--init-state", inf_init, "Known x_0 (uniform prior when omitted)");
  infer_cmd->add_option("--method", inf_method, "Methods to run")->check(CLI::IsMember({"filter", "smoother", "both"}));
  infer_cmd->add_option("--out", inf_out, "Belief trace CSV path ('-' for stdout)");

  auto* verify = app.add_subcommand("verify", "Compare inference against brute-force enumeration");
  int ver_instances = 200;
  std::uint64_t ver_seed = 1;
  verify->add_option("--instances", ver_instances, "Random instances to check")->check(CLI::PositiveNumber);
  verify->add_option("--seed", ver_seed, "Master seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*validate) {
      code = cmd_validate_map(validate_path, out);
    } else if (*generate) {
      std::set<NodeId> main_road;
      for (NodeId n = 1; n <= std::min(9, gen_nodes - 1); ++n) main_road.insert(n);
      emit(gen_out, save_map(generate_default_map(gen_nodes, main_road, gen_seed)), out);
    } else if (*simulate) {
      code = cmd_simulate(sim, out, err);
    } else if (*table) {
      code = cmd_replicate_table1(table_seed, table_trials, table_threads, table_out, out);
    } else if (*export_cmd) {
      code = cmd_export_matrices(exp_map, exp_sigma, exp_format, exp_prefix, out);
    } else if (*infer_cmd) {
      code = cmd_infer(inf_map, inf_sigma, inf_measurements, inf_init, inf_method, inf_out, out);
    } else if (*verify) {
      code = cmd_verify(ver_instances, ver_seed, out);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return code;
}

}  // namespace vpr
