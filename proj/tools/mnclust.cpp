// Command-line front end: simulate benchmark datasets, pick a cluster count,
// cluster at a fixed count, or score a given assignment.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mnclust/io.hpp"
#include "mnclust/search.hpp"
#include "mnclust/sim.hpp"
#include "mnclust/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mnclust;

namespace {

struct PriorFlags {
  std::string prior = "flat";
  double sigma2 = 1.0;
  std::string precision_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--prior", prior, "Prior over cluster means")
        ->check(CLI::IsMember({"flat", "normal"}))
        ->capture_default_str();
    cmd->add_option("--prior-sigma2", sigma2,
                    "Isotropic normal prior variance (Gamma_0 = I / sigma2)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--prior-precision-file", precision_file,
                    "JSON file holding a general prior precision matrix");
  }

  PriorSpec build(int dim) const {
    if (prior == "flat") return PriorSpec::flat();
    if (!precision_file.empty()) {
      json doc;
      try {
        std::ifstream in(precision_file);
        if (!in) throw ParseError("cannot open " + precision_file);
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ParseError(precision_file + ": " + e.what());
      }
      Mat m(doc.size(), doc.size());
      for (std::size_t r = 0; r < doc.size(); ++r) {
        if (!doc[r].is_array() || doc[r].size() != doc.size()) {
          throw ParseError(precision_file + ": matrix must be square");
        }
        for (std::size_t c = 0; c < doc.size(); ++c) {
          m(static_cast<int>(r), static_cast<int>(c)) = doc[r][c].get<double>();
        }
      }
      if (m.rows() != dim) {
        throw DimensionMismatch("prior precision dimension != dataset dimension");
      }
      return PriorSpec::normal(SpdMatrix(std::move(m)));
    }
    return PriorSpec::isotropic_normal(dim, sigma2);
  }

  json echo() const {
    json j = {{"prior", prior}};
    if (prior == "normal") {
      if (!precision_file.empty()) {
        j["prior_precision_file"] = precision_file;
      } else {
        j["prior_sigma2"] = sigma2;
      }
    }
    return j;
  }
};

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory " + out);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

SimulationConfig load_sim_config(const std::string& path) {
  json doc;
  try {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  SimulationConfig c;
  c.dim = doc.value("dim", c.dim);
  if (doc.contains("cluster_sizes")) {
    if (doc["cluster_sizes"].is_string() &&
        doc["cluster_sizes"].get<std::string>() == "published") {
      c.cluster_sizes = published_cluster_sizes();
    } else {
      c.cluster_sizes = doc["cluster_sizes"].get<std::vector<int>>();
    }
  } else {
    c.cluster_sizes = published_cluster_sizes();
  }
  c.s0 = doc.value("s0", c.s0);
  c.a0 = doc.value("a0", c.a0);
  c.b0 = doc.value("b0", c.b0);
  c.s = doc.value("s", c.s);
  c.a = doc.value("a", c.a);
  c.b = doc.value("b", c.b);
  c.c = doc.value("c", c.c);
  c.n_candidates = doc.value("n_candidates", c.n_candidates);
  c.alpha = doc.value("alpha", c.alpha);
  c.filter_fdr = doc.value("filter_fdr", c.filter_fdr);
  std::string fc = doc.value("filter_covariance", std::string("cluster"));
  if (fc == "sampling") {
    c.filter_covariance = SimulationConfig::FilterCovariance::SamplingCov;
  } else if (fc == "cluster") {
    c.filter_covariance = SimulationConfig::FilterCovariance::ClusterCov;
  } else {
    throw ConfigError(path + ": filter_covariance must be sampling|cluster");
  }
  c.seed = doc.value("seed", c.seed);
  return c;
}

json sim_config_echo(const SimulationConfig& c) {
  return {{"dim", c.dim},
          {"cluster_sizes", c.cluster_sizes},
          {"s0", c.s0},
          {"a0", c.a0},
          {"b0", c.b0},
          {"s", c.s},
          {"a", c.a},
          {"b", c.b},
          {"c", c.c},
          {"n_candidates", c.n_candidates},
          {"alpha", c.alpha},
          {"filter_covariance",
           c.filter_covariance == SimulationConfig::FilterCovariance::SamplingCov
               ? "sampling"
               : "cluster"},
          {"filter_fdr", c.filter_fdr},
          {"seed", c.seed}};
}

int run_simulate(const std::string& config_path, const std::string& out,
                 const std::optional<std::uint64_t>& seed) {
  Stopwatch timer;
  SimulationConfig config = load_sim_config(config_path);
  if (seed) config.seed = *seed;
  SimulatedDataset sim = generate(config);
  ensure_out_dir(out);

  save_dataset_json(out + "/dataset.json", sim.dataset);
  save_assignment(out + "/truth.csv", sim.dataset, sim.truth);

  json summary = {{"n_items", sim.dataset.size()},
                  {"n_clusters", sim.truth.num_clusters()},
                  {"e_mu_sq", sim.e_mu_sq},
                  {"e_x_sq", sim.e_x_sq},
                  {"snr", sim.e_mu_sq / sim.e_x_sq}};
  std::ofstream(out + "/summary.json") << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.config = sim_config_echo(config).dump();
  manifest.seed = config.seed;
  manifest.input_path = config_path;
  manifest.output_dir = out;
  manifest.duration_seconds = timer.seconds();
  save_manifest(out + "/manifest.json", manifest);
  return 0;
}

int run_select(const std::string& input, const std::string& out, int k_min,
               int k_max, const PriorFlags& prior_flags, double alpha,
               bool squared, std::uint64_t seed) {
  Stopwatch timer;
  Dataset data = load_dataset(input);
  if (k_min < 1 || k_max > data.size() || k_min > k_max) {
    throw KOutOfRange("k range must satisfy 1 <= k-min <= k-max <= n");
  }
  PriorSpec prior = prior_flags.build(data.dim());
  std::optional<PriorSpec> normal_prior;
  if (prior.is_normal()) normal_prior = prior;

  Mat dist = bhattacharyya_matrix(data);
  if (squared) dist = dist.cwiseProduct(dist);
  Dendrogram tree = ward_d2_dendrogram(dist);

  std::map<int, Partition> candidates;
  for (int k = k_min; k <= k_max; ++k) {
    candidates.emplace(k, cut_dendrogram(tree, k));
  }
  SelectionReport report = select_k(data, candidates, normal_prior, alpha);

  ensure_out_dir(out);
  save_curve(out + "/curve.csv", report);
  for (const auto& row : report.rows) {
    save_assignment(out + "/assignment_k" + std::to_string(row.k) + ".csv",
                    data, row.partition);
  }

  json summary = {{"k_min", k_min},
                  {"k_max", k_max},
                  {"alpha", report.alpha},
                  {"best_k_flat", report.best_k_flat}};
  if (report.best_k_normal) summary["best_k_normal"] = *report.best_k_normal;
  if (report.fewest_k_significant) {
    summary["fewest_k_equal_means"] = *report.fewest_k_significant;
  }
  std::ofstream(out + "/summary.json") << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";

  json config = prior_flags.echo();
  config["k_min"] = k_min;
  config["k_max"] = k_max;
  config["alpha"] = alpha;
  config["squared_distances"] = squared;

  RunManifest manifest;
  manifest.command = "select";
  manifest.config = config.dump();
  manifest.seed = seed;
  manifest.input_path = input;
  manifest.output_dir = out;
  manifest.duration_seconds = timer.seconds();
  save_manifest(out + "/manifest.json", manifest);
  return 0;
}

int run_cluster(const std::string& input, const std::string& out,
                std::optional<int> k, const PriorFlags& prior_flags,
                const std::string& search, int restarts, int sweeps,
                double temperature, long steps, std::uint64_t seed,
                bool squared) {
  Stopwatch timer;
  Dataset data = load_dataset(input);
  if (k && (*k < 1 || *k > data.size())) {
    throw KOutOfRange("--k must lie in 1..n");
  }
  PriorSpec prior = prior_flags.build(data.dim());

  Partition start = Partition::all_singletons(data.size());
  if (k) {
    Mat dist = bhattacharyya_matrix(data);
    if (squared) dist = dist.cwiseProduct(dist);
    start = cut_dendrogram(ward_d2_dendrogram(dist), *k);
  }

  Partition result = start;
  if (search == "dendrogram") {
    if (!k) throw ConfigError("--search dendrogram requires --k");
  } else if (search == "greedy") {
    SearchConfig config;
    config.max_sweeps = sweeps;
    config.restarts = restarts;
    config.seed = seed;
    result = greedy_improve(data, start, prior, config).first;
  } else {  // metropolis
    SearchConfig config;
    config.temperature = temperature;
    config.steps = steps;
    config.seed = seed;
    auto records = metropolis_sample(data, start, prior, config);
    const SampleRecord* best = &records.front();
    for (const auto& rec : records) {
      if (rec.total > best->total) best = &rec;
    }
    result = best->partition;
  }

  LikelihoodBreakdown breakdown = log_likelihood(data, result, prior);
  ChiSqResult chi = equal_means_chisq(data, result);

  ensure_out_dir(out);
  save_assignment(out + "/assignment.csv", data, result);
  save_breakdown(out + "/breakdown.json", breakdown);

  json summary = {{"n_clusters", canonicalize(result).num_clusters()},
                  {"total", breakdown.total},
                  {"chisq", chi.statistic},
                  {"dof", chi.dof},
                  {"p_value", chi.p_value}};
  std::ofstream(out + "/summary.json") << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";

  json config = prior_flags.echo();
  config["search"] = search;
  if (k) config["k"] = *k;
  config["restarts"] = restarts;
  config["sweeps"] = sweeps;
  config["temperature"] = temperature;
  config["steps"] = steps;
  config["squared_distances"] = squared;

  RunManifest manifest;
  manifest.command = "cluster";
  manifest.config = config.dump();
  manifest.seed = seed;
  manifest.input_path = input;
  manifest.output_dir = out;
  manifest.duration_seconds = timer.seconds();
  save_manifest(out + "/manifest.json", manifest);
  return 0;
}

int run_evaluate(const std::string& input, const std::string& assignment,
                 const PriorFlags& prior_flags, const std::string& out) {
  Stopwatch timer;
  Dataset data = load_dataset(input);
  PriorSpec prior = prior_flags.build(data.dim());
  Partition partition = load_assignment(assignment, data);

  LikelihoodBreakdown b = log_likelihood(data, partition, prior);
  ChiSqResult chi = equal_means_chisq(data, partition);

  json report = {{"n_clusters", partition.num_clusters()},
                 {"breakdown",
                  {{"data_term", b.data_term},
                   {"prior_norm_term", b.prior_norm_term},
                   {"complexity_term", b.complexity_term},
                   {"fit_term", b.fit_term},
                   {"shrink_term", b.shrink_term},
                   {"total", b.total}}},
                 {"equal_means",
                  {{"chisq", chi.statistic},
                   {"dof", chi.dof},
                   {"p_value", chi.p_value}}}};
  std::cout << report.dump(2) << "\n";

  if (!out.empty()) {
    ensure_out_dir(out);
    std::ofstream(out + "/report.json") << report.dump(2) << "\n";
    json config = prior_flags.echo();
    config["assignment"] = assignment;
    RunManifest manifest;
    manifest.command = "evaluate";
    manifest.config = config.dump();
    manifest.input_path = input;
    manifest.output_dir = out;
    manifest.duration_seconds = timer.seconds();
    save_manifest(out + "/manifest.json", manifest);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-based clustering of normal estimates with exact "
               "partition log-likelihoods"};
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a benchmark dataset");
  std::string sim_config, sim_out;
  std::optional<std::uint64_t> sim_seed;
  sim_cmd->add_option("--config", sim_config, "Simulation config (JSON)")
      ->required();
  sim_cmd->add_option("--out", sim_out, "Output directory")->required();
  sim_cmd->add_option("--seed", sim_seed, "Override config seed");

  // select
  auto* sel_cmd = app.add_subcommand(
      "select", "Score dendrogram cuts over a range of cluster counts");
  std::string sel_input, sel_out;
  int k_min = 1, k_max = 0;
  double sel_alpha = 0.05;
  bool sel_squared = false;
  std::uint64_t sel_seed = 0;
  PriorFlags sel_prior;
  sel_cmd->add_option("--input", sel_input, "Dataset file")->required();
  sel_cmd->add_option("--out", sel_out, "Output directory")->required();
  sel_cmd->add_option("--k-min", k_min, "Smallest cluster count")
      ->capture_default_str();
  sel_cmd->add_option("--k-max", k_max, "Largest cluster count (default n)");
  sel_cmd->add_option("--alpha", sel_alpha, "Equal-means test level")
      ->capture_default_str();
  sel_cmd->add_flag("--squared-distances", sel_squared,
                    "Agglomerate on squared Bhattacharyya distances");
  sel_cmd->add_option("--seed", sel_seed, "Recorded in the manifest");
  sel_prior.attach(sel_cmd);

  // cluster
  auto* clu_cmd = app.add_subcommand("cluster", "Cluster at a fixed count or "
                                                "by likelihood search");
  std::string clu_input, clu_out, clu_search = "dendrogram";
  std::optional<int> clu_k;
  int restarts = 1, sweeps = 100;
  double temperature = 1.0;
  long steps = 100000;
  std::uint64_t clu_seed = 0;
  bool clu_squared = false;
  PriorFlags clu_prior;
  clu_cmd->add_option("--input", clu_input, "Dataset file")->required();
  clu_cmd->add_option("--out", clu_out, "Output directory")->required();
  clu_cmd->add_option("--k", clu_k, "Cluster count (dendrogram cut / start)");
  clu_cmd->add_option("--search", clu_search, "Search strategy")
      ->check(CLI::IsMember({"dendrogram", "greedy", "metropolis"}))
      ->capture_default_str();
  clu_cmd->add_option("--restarts", restarts, "Greedy restarts")
      ->capture_default_str();
  clu_cmd->add_option("--sweeps", sweeps, "Greedy sweep limit")
      ->capture_default_str();
  clu_cmd->add_option("--temperature", temperature, "Metropolis temperature")
      ->capture_default_str();
  clu_cmd->add_option("--steps", steps, "Metropolis chain length")
      ->capture_default_str();
  clu_cmd->add_option("--seed", clu_seed, "Search seed")->capture_default_str();
  clu_cmd->add_flag("--squared-distances", clu_squared,
                    "Agglomerate on squared Bhattacharyya distances");
  clu_prior.attach(clu_cmd);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate",
                                      "Score an existing assignment");
  std::string eval_input, eval_assignment, eval_out;
  PriorFlags eval_prior;
  eval_cmd->add_option("--input", eval_input, "Dataset file")->required();
  eval_cmd->add_option("--assignment", eval_assignment, "Assignment CSV")
      ->required();
  eval_cmd->add_option("--out", eval_out, "Optional output directory");
  eval_prior.attach(eval_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim_cmd->parsed()) return run_simulate(sim_config, sim_out, sim_seed);
    if (sel_cmd->parsed()) {
      Dataset probe = load_dataset(sel_input);
      int effective_k_max = k_max > 0 ? k_max : probe.size();
      return run_select(sel_input, sel_out, k_min, effective_k_max, sel_prior,
                        sel_alpha, sel_squared, sel_seed);
    }
    if (clu_cmd->parsed()) {
      return run_cluster(clu_input, clu_out, clu_k, clu_prior, clu_search,
                         restarts, sweeps, temperature, steps, clu_seed,
                         clu_squared);
    }
    return run_evaluate(eval_input, eval_assignment, eval_prior, eval_out);
  } catch (const NotPositiveDefinite& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const QuadratureNonConvergence& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const EmptyClusterResult& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
