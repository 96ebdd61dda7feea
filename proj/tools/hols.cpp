// Copyright 2026 The HOLS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// hols: label spreading with clique motifs, homogeneity analysis, clique
// enumeration and benchmark experiments.
//
// Exit status: 0 success, 1 runtime or experiment failure, 2 usage or input
// error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hols/hols.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct GraphInput {
  std::string graph;
  bool weighted = false;
};

struct LabelInput {
  std::string labels;
  bool one_based = false;
  std::optional<std::size_t> num_classes;
};

struct SpreadArgs {
  GraphInput g;
  LabelInput l;
  std::string motifs = "2";
  std::string alphas = "1.0";
  hols::SolverConfig solver;
  std::string out;
  std::string scores;
  std::string result_json;
  std::string cache;
  bool propagate = false;
  std::size_t threads = 1;
  std::size_t max_k = hols::kDefaultMaxCliqueSize;
};

struct AnalyzeArgs {
  GraphInput g;
  LabelInput l;
  std::size_t k = 3;
  std::size_t reps = hols::kDefaultShuffleReps;
  std::uint64_t seed = hols::kDefaultShuffleSeed;
  std::string out;
  std::string json;
  std::size_t threads = 1;
  std::size_t max_k = hols::kDefaultMaxCliqueSize;
};

struct EnumerateArgs {
  GraphInput g;
  std::size_t k = 3;
  std::string dump;
  std::size_t threads = 1;
  std::size_t max_k = hols::kDefaultMaxCliqueSize;
};

struct BenchArgs {
  std::string config;
  std::string out;
  std::string table;
  std::string alpha_csv;
  std::string clique_csv;
  std::optional<std::uint64_t> seed;
  bool with_timing = false;
  std::size_t threads = 1;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hols::ValidationError("cannot open " + path);
  return in;
}

// Writes to a temporary sibling and renames, so a failed run never leaves a
// truncated output behind.
void write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw hols::ValidationError("cannot write " + path);
    out << content;
    if (!out.flush()) throw hols::Error("write to " + path + " failed");
  }
  std::filesystem::rename(tmp, path);
}

hols::LoadedGraph read_graph(const GraphInput& in) {
  auto stream = open_input(in.graph);
  return hols::load_edge_list(stream, {in.weighted});
}

hols::LabelAssignment read_labels(const LabelInput& in, const hols::VertexIdMap& ids) {
  auto stream = open_input(in.labels);
  return hols::load_labels(stream, ids, {in.num_classes, in.one_based});
}

void add_graph_flags(CLI::App* cmd, GraphInput& g) {
  cmd->add_option("--graph", g.graph, "Edge list: 'u v' or 'u v w' per line, '#' comments")
      ->required();
  cmd->add_flag("--weighted", g.weighted, "Read a third column as the edge weight");
}

void add_label_flags(CLI::App* cmd, LabelInput& l) {
  cmd->add_option("--labels", l.labels, "Label file: 'vertex class' per line")->required();
  cmd->add_flag("--one-based", l.one_based, "Class ids in files start at 1");
  cmd->add_option("--num-classes", l.num_classes, "Number of classes (default: 1 + largest id)");
}

int run_spread(const SpreadArgs& a) {
  const auto loaded = read_graph(a.g);
  const auto seeds = read_labels(a.l, loaded.ids);
  const auto plan = hols::MotifPlan(hols::parse_size_list(a.motifs), hols::parse_real_list(a.alphas));
  hols::EnumerationOptions enumeration{a.threads, a.max_k};
  const auto digest = hols::graph_digest(loaded.graph);

  std::optional<hols::SparseSymmetricMatrix> reweighted;
  if (!a.cache.empty() && std::filesystem::exists(a.cache)) {
    std::ifstream in(a.cache, std::ios::binary);
    reweighted = hols::load_reweighted_cache(in, digest, plan);
    if (!reweighted) std::cerr << "cache " << a.cache << " does not match; rebuilding\n";
  }
  if (!reweighted) {
    const auto parts = hols::build_participations(loaded.graph, plan, enumeration);
    std::vector<const hols::SparseSymmetricMatrix*> mats;
    for (const auto& p : parts) mats.push_back(&p.entries);
    reweighted = hols::SparseSymmetricMatrix::weighted_sum(mats, plan.alphas());
    if (!a.cache.empty()) {
      std::ostringstream buf(std::ios::binary);
      hols::save_reweighted_cache(buf, digest, plan, *reweighted);
      write_file(a.cache, buf.str());
    }
  }
  const auto op = hols::PropagationOperator::from_reweighted(std::move(*reweighted));
  const auto prior = hols::prior_from_labels(seeds);

  hols::SpreadResult result;
  if (a.propagate) {
    std::vector<hols::VertexId> labeled;
    for (hols::VertexId v = 0; v < seeds.num_vertices(); ++v) {
      if (seeds.is_labeled(v)) labeled.push_back(v);
    }
    result = hols::label_propagation(op, prior, labeled, a.solver);
  } else {
    result = hols::spread(op, prior, a.solver);
  }
  if (!result.converged) {
    std::cerr << "warning: not converged after " << result.iterations
              << " iterations (residual " << result.final_residual << ")\n";
  }
  const auto hard = hols::harden(result.soft, &seeds);
  if (!hard.ties.empty()) {
    std::cerr << hard.ties.size() << " vertices had tied or all-zero scores\n";
  }

  std::ostringstream out;
  const hols::ClassId shift = a.l.one_based ? 1 : 0;
  for (hols::VertexId v = 0; v < hard.labels.num_vertices(); ++v) {
    out << loaded.ids.to_external(v) << ' ' << *hard.labels.get(v) + shift << '\n';
  }
  if (a.out.empty()) {
    std::cout << out.str();
  } else {
    write_file(a.out, out.str());
  }
  if (!a.scores.empty()) {
    std::ostringstream s;
    hols::write_scores_csv(s, result.soft, loaded.ids);
    write_file(a.scores, s.str());
  }
  if (!a.result_json.empty()) {
    auto j = hols::to_json(result);
    j["method"] = a.propagate ? "propagate" : "spread";
    j["plan"] = plan.to_string();
    j["eta"] = a.solver.eta;
    j["epsilon"] = a.solver.epsilon;
    j["max_iters"] = a.solver.max_iters;
    j["ties"] = hard.ties.size();
    write_file(a.result_json, j.dump(2) + "\n");
  }
  return kExitOk;
}

int run_analyze(const AnalyzeArgs& a) {
  const auto loaded = read_graph(a.g);
  const auto labels = read_labels(a.l, loaded.ids);
  if (const auto v = labels.first_unlabeled()) {
    throw hols::ValidationError("vertex " + std::to_string(loaded.ids.to_external(*v)) +
                                " has no label; analyze needs every vertex labeled");
  }
  hols::HomogeneityOptions options{{a.threads, a.max_k}};
  const auto observed = hols::observed_distribution(loaded.graph, labels, a.k, options);
  const auto null_model =
      hols::shuffled_distribution(loaded.graph, labels, a.k, a.reps, a.seed, options);
  const auto report = hols::homogeneity_report(observed, null_model);
  std::ostringstream csv;
  hols::write_report_csv(csv, report);
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(a.out, csv.str());
  }
  if (!a.json.empty()) {
    const hols::HomogeneityMetadata meta{hols::graph_digest(loaded.graph), a.reps, a.seed,
                                         labels.num_classes()};
    write_file(a.json, hols::to_json(report, observed, null_model, meta).dump(2) + "\n");
  }
  return kExitOk;
}

int run_enumerate(const EnumerateArgs& a) {
  const auto loaded = read_graph(a.g);
  hols::validate_clique_size(a.k, a.max_k);
  hols::EnumerationOptions options{a.threads, a.max_k};
  std::uint64_t count = 0;
  if (a.dump.empty()) {
    count = hols::count_cliques(loaded.graph, a.k, options);
  } else {
    // Sequential so the dump order is reproducible.
    options.threads = 1;
    std::ostringstream out;
    count = hols::enumerate_cliques(
        loaded.graph, a.k,
        [&](std::span<const hols::VertexId> vs, double w) { hols::write_clique(out, vs, w, loaded.ids); },
        options);
    write_file(a.dump, out.str());
  }
  std::cout << count << '\n';
  return kExitOk;
}

int run_bench(const BenchArgs& a) {
  auto in = open_input(a.config);
  auto cfg = hols::parse_experiment_config(in, std::filesystem::path(a.config).parent_path());
  if (a.seed) cfg.seed = *a.seed;
  cfg.enumeration.threads = a.threads;
  const auto data = hols::load_dataset(cfg);
  cfg.validate(data.truth.num_classes());
  const auto seed_sets = hols::draw_seed_sets(data.truth, cfg.num_seeds, cfg.runs, cfg.seed);
  const auto report = hols::run_experiment(data, cfg, seed_sets);

  std::ostringstream table;
  hols::write_report_table(table, report, a.with_timing);
  if (a.table.empty()) {
    std::cout << table.str();
  } else {
    write_file(a.table, table.str());
  }
  if (!a.out.empty()) write_file(a.out, hols::to_json(report, a.with_timing).dump(2) + "\n");

  if (!cfg.sweep_alphas.empty()) {
    const auto rows = hols::sweep_alpha(data, cfg.solver, seed_sets, cfg.sweep_alphas, cfg.enumeration);
    std::ostringstream csv;
    hols::write_alpha_sweep_csv(csv, rows);
    if (a.alpha_csv.empty()) {
      std::cout << '\n' << csv.str();
    } else {
      write_file(a.alpha_csv, csv.str());
    }
  }
  if (!cfg.sweep_max_cliques.empty()) {
    const auto rows =
        hols::sweep_max_clique(data, cfg.solver, seed_sets, cfg.sweep_max_cliques, cfg.enumeration);
    std::ostringstream csv;
    hols::write_clique_sweep_csv(csv, rows);
    if (a.clique_csv.empty()) {
      std::cout << '\n' << csv.str();
    } else {
      write_file(a.clique_csv, csv.str());
    }
  }
  for (std::size_t r = 0; r < report.run_errors.size(); ++r) {
    if (report.run_errors[r]) std::cerr << "run " << r << " failed: " << *report.run_errors[r] << '\n';
  }
  return report.failed_runs() > 0 ? kExitFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label spreading with clique motifs"};
  app.require_subcommand(1);

  SpreadArgs spread_args;
  auto* spread = app.add_subcommand("spread", "Spread seed labels to every vertex");
  add_graph_flags(spread, spread_args.g);
  add_label_flags(spread, spread_args.l);
  spread->add_option("--motifs", spread_args.motifs, "Clique sizes, comma separated")
      ->capture_default_str();
  spread->add_option("--alpha", spread_args.alphas, "Motif weights aligned with --motifs, summing to 1")
      ->capture_default_str();
  spread->add_option("--eta", spread_args.solver.eta, "Spreading strength in (0, 1)")->capture_default_str();
  spread->add_option("--epsilon", spread_args.solver.epsilon, "Stop when the max entry change is below this")
      ->capture_default_str();
  spread->add_option("--max-iters", spread_args.solver.max_iters, "Iteration cap")->capture_default_str();
  spread->add_option("--out", spread_args.out, "Write 'vertex class' lines here (default stdout)");
  spread->add_option("--scores", spread_args.scores, "Write soft scores as CSV");
  spread->add_option("--result-json", spread_args.result_json, "Write convergence details as JSON");
  spread->add_option("--cache", spread_args.cache, "Binary cache of the reweighted adjacency");
  spread->add_flag("--propagate", spread_args.propagate,
                   "Use clamped random-walk propagation instead of spreading");
  spread->add_option("--threads", spread_args.threads, "Enumeration threads (0 = all cores)")
      ->capture_default_str();
  spread->add_option("--max-k", spread_args.max_k, "Largest clique size accepted")->capture_default_str();

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Compare clique label configurations with shuffled labels");
  add_graph_flags(analyze, analyze_args.g);
  add_label_flags(analyze, analyze_args.l);
  analyze->add_option("--k", analyze_args.k, "Clique size")->capture_default_str();
  analyze->add_option("--reps", analyze_args.reps, "Shuffles pooled into the null distribution")
      ->capture_default_str();
  analyze->add_option("--seed", analyze_args.seed, "Shuffle seed")->capture_default_str();
  analyze->add_option("--out", analyze_args.out, "Write the CSV report here (default stdout)");
  analyze->add_option("--json", analyze_args.json, "Also write the report as JSON");
  analyze->add_option("--threads", analyze_args.threads, "Enumeration threads (0 = all cores)")
      ->capture_default_str();
  analyze->add_option("--max-k", analyze_args.max_k, "Largest clique size accepted")->capture_default_str();

  EnumerateArgs enumerate_args;
  auto* enumerate = app.add_subcommand("enumerate", "Count k-cliques");
  add_graph_flags(enumerate, enumerate_args.g);
  enumerate->add_option("--k", enumerate_args.k, "Clique size")->capture_default_str();
  enumerate->add_option("--dump", enumerate_args.dump, "Write one clique per line: vertices, then weight");
  enumerate->add_option("--threads", enumerate_args.threads, "Enumeration threads (0 = all cores)")
      ->capture_default_str();
  enumerate->add_option("--max-k", enumerate_args.max_k, "Largest clique size accepted")
      ->capture_default_str();

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run a classification experiment from a config file");
  bench->add_option("--config", bench_args.config, "Experiment config (key = value lines)")->required();
  bench->add_option("--out", bench_args.out, "Write the report as JSON");
  bench->add_option("--table", bench_args.table, "Write the text table here (default stdout)");
  bench->add_option("--alpha-csv", bench_args.alpha_csv, "Write the triangle-weight sweep here");
  bench->add_option("--clique-csv", bench_args.clique_csv, "Write the clique-size sweep here");
  bench->add_option("--seed", bench_args.seed, "Override the config's seed");
  bench->add_flag("--with-timing", bench_args.with_timing, "Include wall-clock timings in the outputs");
  bench->add_option("--threads", bench_args.threads, "Enumeration threads (0 = all cores)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*spread) return run_spread(spread_args);
    if (*analyze) return run_analyze(analyze_args);
    if (*enumerate) return run_enumerate(enumerate_args);
    return run_bench(bench_args);
  } catch (const hols::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const hols::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const hols::CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
