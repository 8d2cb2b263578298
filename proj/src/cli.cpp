#include "ricf/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "ricf/io.hpp"
#include "ricf/simulate.hpp"

namespace ricf::cli {

namespace {

int exit_code_for(const Error& e) {
  const auto& k = e.kind();
  if (k == "parse" || k == "empty-data") return parse;
  if (k == "model-class" || k == "cyclic-graph") return model_class;
  if (k == "not-positive-definite" || k == "rank-deficient") return not_positive_definite;
  if (k == "invalid-config") return usage;
  return failure;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  std::string flat = message;
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  err << "error: " << kind << ": " << flat << "\n";
}

GraphPtr load_graph(const std::string& path) {
  return std::make_shared<const MixedGraph>(parse_graph(read_text_file(path)));
}

// ---------------------------------------------------------------- check

struct CheckOptions {
  std::string graph;
};

int do_check(const CheckOptions& o, std::ostream& out) {
  const auto g = load_graph(o.graph);
  out << graph_summary(*g).dump(2) << "\n";
  return ok;
}

// ---------------------------------------------------------------- fit

struct FitOptions {
  std::string graph;
  std::string input;
  bool cov = false;
  long long n = 0;
  double tol = FitConfig{}.tol;
  int max_cycles = FitConfig{}.max_cycles;
  bool center = false;
  std::string start = "dag";
  std::uint64_t seed = 0;
  std::string district = "on";
  std::string output;
};

int do_fit(const FitOptions& o, std::ostream& out) {
  const auto g = load_graph(o.graph);
  if (!is_acyclic(*g)) throw ModelClassError("path diagram has a directed cycle");
  if (!is_bow_free(*g)) throw ModelClassError("path diagram has a bow");

  const std::string text = read_text_file(o.input);
  std::optional<EmpiricalCovariance<double>> s;
  if (o.cov) {
    if (o.n < 1) throw InvalidConfigError("--cov requires --n <sample size>");
    if (o.center) throw InvalidConfigError("--center cannot be applied to covariance input");
    s = parse_covariance_csv(text, *g, static_cast<Index>(o.n));
  } else {
    s = empirical_covariance(parse_data_csv(text, *g), o.center);
  }

  FitConfig config;
  config.tol = o.tol;
  config.max_cycles = o.max_cycles;
  config.use_district_restriction = o.district == "on";
  std::optional<StartingValues<double>> start;
  if (o.start == "random") {
    auto params = random_parameters<double>(g, o.seed);
    start = StartingValues<double>{params.b, params.omega};
    config.starting_value_policy = StartingValuePolicy::supplied;
  }

  const auto result = fit(g, *s, config, start);
  const std::string report = fit_report(result, s->n(), s->centered()).dump(2) + "\n";
  if (o.output.empty()) {
    out << report;
  } else {
    write_text_file(o.output, report);
  }
  switch (result.status) {
    case FitStatus::converged: return ok;
    case FitStatus::max_cycles_reached: return max_cycles;
    case FitStatus::parameter_divergence_sigma_converged: return divergence;
  }
  return failure;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  int p = 0;
  double d = 0.1;
  double b = 0.05;
  long long n = 0;
  int replicates = 1;
  std::uint64_t seed = 0;
  std::string output_dir;
};

nlohmann::json parameters_json(const ModelParameters<double>& params) {
  const MixedGraph& g = params.b.graph();
  const ParameterVectorization v(g);
  nlohmann::json beta = nlohmann::json::array(), omega = nlohmann::json::array();
  for (const auto& e : v.beta_index()) {
    beta.push_back({{"from", g.names()[e.col]}, {"to", g.names()[e.row]}, {"value", params.b(e.row, e.col)}});
  }
  for (const auto& e : v.omega_index()) {
    omega.push_back(
        {{"vertex1", g.names()[e.row]}, {"vertex2", g.names()[e.col]}, {"value", params.omega(e.row, e.col)}});
  }
  return {{"beta", beta}, {"omega", omega}};
}

int do_simulate(const SimulateOptions& o, std::ostream& out) {
  BapGenConfig{o.p, o.d, o.b, o.seed}.validate();
  if (o.p < 1) throw InvalidConfigError("--p must be at least 1");
  if (o.n < 1) throw InvalidConfigError("--n must be at least 1");
  if (o.replicates < 1) throw InvalidConfigError("--replicates must be at least 1");

  namespace fs = std::filesystem;
  const fs::path dir(o.output_dir);
  fs::create_directories(dir);

  nlohmann::json reps = nlohmann::json::array();
  double edge_total = 0.0;
  for (int r = 0; r < o.replicates; ++r) {
    Rng rng(o.seed, static_cast<std::uint64_t>(r));
    const auto g = random_bap(o.p, o.d, o.b, rng);
    const auto params = random_parameters<double>(g, rng);
    const auto y = sample_mvn(phi(params.b, params.omega), static_cast<Index>(o.n), rng);

    std::ostringstream name;
    name << "rep_" << std::setw(4) << std::setfill('0') << r + 1;
    const fs::path rep_dir = dir / name.str();
    fs::create_directories(rep_dir);
    write_text_file(rep_dir / "graph.txt", write_graph(*g));
    write_text_file(rep_dir / "parameters.json", parameters_json(params).dump(2) + "\n");
    write_text_file(rep_dir / "data.csv", write_data_csv(y, *g));

    const auto nd = g->directed_edges().size(), nb = g->bidirected_edges().size();
    edge_total += static_cast<double>(nd + nb);
    reps.push_back({{"id", r + 1},
                    {"graph", name.str() + "/graph.txt"},
                    {"parameters", name.str() + "/parameters.json"},
                    {"data", name.str() + "/data.csv"},
                    {"directed_edges", nd},
                    {"bidirected_edges", nb}});
  }
  const nlohmann::json manifest{{"p", o.p},
                                {"d", o.d},
                                {"b", o.b},
                                {"n", o.n},
                                {"replicates", o.replicates},
                                {"seed", o.seed},
                                {"mean_edge_count", edge_total / o.replicates},
                                {"items", reps}};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << o.replicates << " replicates to " << dir.string() << "\n";
  return ok;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkOptions {
  std::string scenario;
  std::string output;
  int jobs = 1;
  std::uint64_t seed = 0;
  double tol = FitConfig{}.tol;
  int max_cycles = FitConfig{}.max_cycles;
};

struct Scenario {
  int p;
  double d;
  double b;
  long long n;
  int replicates;
};

struct ReplicateOutcome {
  std::size_t scenario;
  int replicate;
  std::size_t directed = 0;
  std::size_t bidirected = 0;
  std::string status;
  int cycles = 0;
  double seconds = 0.0;
  double log_likelihood = 0.0;
};

std::vector<Scenario> parse_scenarios(std::string_view text) {
  std::vector<Scenario> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; }),
               line.end());
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "p,d,b,n,replicates") {
        throw InvalidConfigError("scenario header must be 'p,d,b,n,replicates' (line " + std::to_string(line_no) + ")");
      }
      header_seen = true;
      continue;
    }
    std::istringstream fields(line);
    Scenario s{};
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
    if (!(fields >> s.p >> c1 >> s.d >> c2 >> s.b >> c3 >> s.n >> c4 >> s.replicates) || c1 != ',' ||
        c2 != ',' || c3 != ',' || c4 != ',' || fields.peek() != std::char_traits<char>::eof()) {
      throw InvalidConfigError("malformed scenario on line " + std::to_string(line_no));
    }
    BapGenConfig{s.p, s.d, s.b, 0}.validate();
    if (s.p < 1 || s.n < 1 || s.replicates < 1) {
      throw InvalidConfigError("scenario on line " + std::to_string(line_no) + " needs p, n, replicates >= 1");
    }
    out.push_back(s);
  }
  if (out.empty()) throw InvalidConfigError("scenario file lists no scenarios");
  return out;
}

double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

ReplicateOutcome run_replicate(const Scenario& sc, std::size_t scenario, int replicate,
                               const BenchmarkOptions& o) {
  ReplicateOutcome r{scenario, replicate};
  Rng rng(o.seed, (static_cast<std::uint64_t>(scenario) << 32) | static_cast<std::uint64_t>(replicate));
  const auto g = random_bap(sc.p, sc.d, sc.b, rng);
  r.directed = g->directed_edges().size();
  r.bidirected = g->bidirected_edges().size();
  const auto params = random_parameters<double>(g, rng);
  const auto y = sample_mvn(phi(params.b, params.omega), static_cast<Index>(sc.n), rng);
  const auto s = empirical_covariance(y, false);
  FitConfig config;
  config.tol = o.tol;
  config.max_cycles = o.max_cycles;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto result = fit(g, s, config);
    r.status = std::string(to_string(result.status));
    r.cycles = result.cycles_used;
    r.log_likelihood = result.log_likelihood();
  } catch (const Error& e) {
    r.status = "error:" + e.kind();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

int do_benchmark(const BenchmarkOptions& o, std::ostream& out) {
  if (o.jobs < 1) throw InvalidConfigError("--jobs must be at least 1");
  const auto scenarios = parse_scenarios(read_text_file(o.scenario));

  std::vector<std::pair<std::size_t, int>> tasks;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    for (int r = 0; r < scenarios[k].replicates; ++r) tasks.emplace_back(k, r + 1);
  }
  std::vector<ReplicateOutcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) {
      outcomes[t] = run_replicate(scenarios[tasks[t].first], tasks[t].first, tasks[t].second, o);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min<int>(o.jobs, static_cast<int>(tasks.size())); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string reps = "scenario,replicate,p,d,b,n,directed_edges,bidirected_edges,status,cycles,seconds,log_likelihood\n";
  for (const auto& r : outcomes) {
    const auto& sc = scenarios[r.scenario];
    reps += std::to_string(r.scenario + 1) + "," + std::to_string(r.replicate) + "," + std::to_string(sc.p) + "," +
            format_double(sc.d) + "," + format_double(sc.b) + "," + std::to_string(sc.n) + "," +
            std::to_string(r.directed) + "," + std::to_string(r.bidirected) + "," + r.status + "," +
            std::to_string(r.cycles) + "," + format_double(r.seconds) + "," + format_double(r.log_likelihood) + "\n";
  }

  std::string summary =
      "scenario,p,d,b,n,replicates,converged,max_cycles_reached,diverged,errors,"
      "time_min,time_q25,time_median,time_q75,time_max,mean_cycles\n";
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const auto& sc = scenarios[k];
    int converged = 0, maxed = 0, diverged = 0, errors = 0;
    std::vector<double> times;
    double cycles = 0.0;
    for (const auto& r : outcomes) {
      if (r.scenario != k) continue;
      times.push_back(r.seconds);
      cycles += r.cycles;
      if (r.status == "converged") {
        ++converged;
      } else if (r.status == "max_cycles_reached") {
        ++maxed;
      } else if (r.status == "parameter_divergence_sigma_converged") {
        ++diverged;
      } else {
        ++errors;
      }
    }
    summary += std::to_string(k + 1) + "," + std::to_string(sc.p) + "," + format_double(sc.d) + "," +
               format_double(sc.b) + "," + std::to_string(sc.n) + "," + std::to_string(sc.replicates) + "," +
               std::to_string(converged) + "," + std::to_string(maxed) + "," + std::to_string(diverged) + "," +
               std::to_string(errors) + "," + format_double(quantile(times, 0.0)) + "," +
               format_double(quantile(times, 0.25)) + "," + format_double(quantile(times, 0.5)) + "," +
               format_double(quantile(times, 0.75)) + "," + format_double(quantile(times, 1.0)) + "," +
               format_double(cycles / static_cast<double>(times.size())) + "\n";
  }

  const std::filesystem::path summary_path(o.output);
  std::filesystem::path reps_path = summary_path;
  reps_path.replace_extension(".replicates.csv");
  write_text_file(summary_path, summary);
  write_text_file(reps_path, reps);
  out << summary;
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximum likelihood fitting of bow-free acyclic path diagrams", "ricf"};
  app.require_subcommand(1);

  CheckOptions check;
  auto* check_cmd = app.add_subcommand("check", "Report structural properties of a graph file");
  check_cmd->add_option("graph", check.graph, "Graph file")->required();

  FitOptions fo;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a path diagram by residual iterative conditional fitting");
  fit_cmd->add_option("graph", fo.graph, "Graph file")->required();
  fit_cmd->add_option("input", fo.input, "Data CSV (or covariance CSV with --cov)")->required();
  fit_cmd->add_flag("--cov", fo.cov, "Input is a covariance matrix");
  fit_cmd->add_option("--n", fo.n, "Sample size behind --cov input");
  fit_cmd->add_option("--tol", fo.tol, "Convergence tolerance")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--max-cycles", fo.max_cycles, "Cycle budget")->check(CLI::PositiveNumber);
  fit_cmd->add_flag("--center", fo.center, "Subtract sample means before forming S");
  fit_cmd->add_option("--start", fo.start, "Starting values")->check(CLI::IsMember({"dag", "random"}));
  fit_cmd->add_option("--seed", fo.seed, "Seed for --start random");
  fit_cmd->add_option("--district-restriction", fo.district, "Solve pseudo-variables on districts")
      ->check(CLI::IsMember({"on", "off"}));
  fit_cmd->add_option("--out,-o", fo.output, "Report path (default stdout)");

  SimulateOptions so;
  auto* sim_cmd = app.add_subcommand("simulate", "Draw random BAPs, parameters and data");
  sim_cmd->add_option("--p", so.p, "Number of variables")->required();
  sim_cmd->add_option("--d", so.d, "Directed edge probability");
  sim_cmd->add_option("--b", so.b, "Bi-directed edge probability");
  sim_cmd->add_option("--n", so.n, "Sample size")->required();
  sim_cmd->add_option("--replicates", so.replicates, "Number of replicates");
  sim_cmd->add_option("--seed", so.seed, "Seed");
  sim_cmd->add_option("--out,-o", so.output_dir, "Output directory")->required();

  BenchmarkOptions bo;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run simulation scenarios and summarize RICF behaviour");
  bench_cmd->add_option("scenario", bo.scenario, "Scenario CSV (p,d,b,n,replicates)")->required();
  bench_cmd->add_option("--out,-o", bo.output, "Summary CSV path")->required();
  bench_cmd->add_option("--jobs", bo.jobs, "Concurrent fits");
  bench_cmd->add_option("--seed", bo.seed, "Seed");
  bench_cmd->add_option("--tol", bo.tol, "Convergence tolerance")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--max-cycles", bo.max_cycles, "Cycle budget")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return usage;
  }

  try {
    if (*check_cmd) return do_check(check, out);
    if (*fit_cmd) return do_fit(fo, out);
    if (*sim_cmd) return do_simulate(so, out);
    if (*bench_cmd) return do_benchmark(bo, out);
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return failure;
  }
  return usage;
}

}  // namespace ricf::cli
