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

// Transductive classification experiments: stratified seed sets, accuracy
// on the unlabeled vertices, paired micro-sign tests, and parameter sweeps.

#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hols/cliques.hpp"
#include "hols/common.hpp"
#include "hols/graph.hpp"
#include "hols/participation.hpp"
#include "hols/random.hpp"
#include "hols/solver.hpp"

namespace hols {

// ---------------------------------------------------------------------------
// Seed selection

// Per-class seed counts: largest-remainder apportionment of `budget` by class
// frequency, then every class raised to at least one (taken from the largest
// quota), then clamped to the class size with the excess handed to classes
// that still have room. Ties go to the lower class id.
inline std::vector<std::size_t> stratified_quotas(std::span<const std::size_t> class_sizes,
                                                  std::size_t budget) {
  const std::size_t c = class_sizes.size();
  std::size_t total = 0;
  for (std::size_t i = 0; i < c; ++i) {
    if (class_sizes[i] == 0) throw ValidationError(detail::concat("class ", i, " has no members"));
    total += class_sizes[i];
  }
  if (budget < c) {
    throw ValidationError(detail::concat("budget ", budget, " is smaller than the class count ", c));
  }
  if (budget > total) {
    throw ValidationError(detail::concat("budget ", budget, " exceeds the ", total, " labeled vertices"));
  }
  std::vector<std::size_t> quota(c);
  std::vector<double> ideal(c);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < c; ++i) {
    ideal[i] = static_cast<double>(budget) * static_cast<double>(class_sizes[i]) /
               static_cast<double>(total);
    quota[i] = static_cast<std::size_t>(std::floor(ideal[i]));
    assigned += quota[i];
  }
  std::vector<std::size_t> order(c);
  for (std::size_t i = 0; i < c; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ideal[a] - std::floor(ideal[a]) > ideal[b] - std::floor(ideal[b]);
  });
  for (std::size_t i = 0; assigned < budget; i = (i + 1) % c) {
    ++quota[order[i]];
    ++assigned;
  }
  auto largest = [&](auto&& eligible) {
    std::size_t best = c;
    for (std::size_t i = 0; i < c; ++i) {
      if (eligible(i) && (best == c || quota[i] > quota[best])) best = i;
    }
    return best;
  };
  for (std::size_t i = 0; i < c; ++i) {
    if (quota[i] > 0) continue;
    const auto donor = largest([&](std::size_t j) { return quota[j] > 1; });
    --quota[donor];
    quota[i] = 1;
  }
  std::size_t excess = 0;
  for (std::size_t i = 0; i < c; ++i) {
    if (quota[i] > class_sizes[i]) {
      excess += quota[i] - class_sizes[i];
      quota[i] = class_sizes[i];
    }
  }
  while (excess > 0) {
    std::size_t best = c;
    for (std::size_t i = 0; i < c; ++i) {
      if (quota[i] >= class_sizes[i]) continue;
      if (best == c || ideal[i] - static_cast<double>(quota[i]) >
                           ideal[best] - static_cast<double>(quota[best])) {
        best = i;
      }
    }
    ++quota[best];
    --excess;
  }
  return quota;
}

// Labeled seed set drawn class by class, uniformly without replacement.
// Returned sorted by vertex id.
inline std::vector<VertexId> stratified_sample(const LabelAssignment& truth, std::size_t budget,
                                               std::uint64_t seed) {
  const auto quotas = stratified_quotas(truth.class_sizes(), budget);
  std::vector<std::vector<VertexId>> members(truth.num_classes());
  for (VertexId v = 0; v < truth.num_vertices(); ++v) {
    if (const auto c = truth.get(v)) members[*c].push_back(v);
  }
  std::vector<VertexId> chosen;
  chosen.reserve(budget);
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto rng = make_stream(seed, {c});
    sample_prefix(std::span<VertexId>(members[c]), quotas[c], rng);
    chosen.insert(chosen.end(), members[c].begin(),
                  members[c].begin() + static_cast<std::ptrdiff_t>(quotas[c]));
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

// One seed set per run; run r uses a stream derived from (seed, r).
inline std::vector<std::vector<VertexId>> draw_seed_sets(const LabelAssignment& truth,
                                                         std::size_t budget, std::size_t runs,
                                                         std::uint64_t seed) {
  std::vector<std::vector<VertexId>> sets;
  for (std::size_t r = 0; r < runs; ++r) {
    auto rng = make_stream(seed, {r});
    sets.push_back(stratified_sample(truth, budget, rng()));
  }
  return sets;
}

// ---------------------------------------------------------------------------
// Scoring

// Per-vertex correctness over V \ exclude, in ascending vertex order.
inline std::vector<bool> correctness(const LabelAssignment& predicted, const LabelAssignment& truth,
                                     std::span<const VertexId> exclude) {
  if (predicted.num_vertices() != truth.num_vertices()) {
    throw ValidationError("prediction and truth cover different vertex counts");
  }
  std::vector<bool> skip(truth.num_vertices(), false);
  for (auto v : exclude) skip.at(v) = true;
  std::vector<bool> flags;
  for (VertexId v = 0; v < truth.num_vertices(); ++v) {
    if (skip[v]) continue;
    const auto t = truth.get(v);
    const auto p = predicted.get(v);
    if (!t) throw ValidationError(detail::concat("vertex ", v, " has no ground-truth label"));
    flags.push_back(p.has_value() && *p == *t);
  }
  return flags;
}

// Fraction of vertices outside `exclude` whose predicted class is correct.
inline double accuracy(const LabelAssignment& predicted, const LabelAssignment& truth,
                       std::span<const VertexId> exclude) {
  const auto flags = correctness(predicted, truth, exclude);
  if (flags.empty()) throw ValidationError("accuracy over an empty evaluation set");
  const auto hits = std::count(flags.begin(), flags.end(), true);
  return static_cast<double>(hits) / static_cast<double>(flags.size());
}

namespace detail {

// 2 * P(Bin(n, 1/2) >= m) for m >= n/2.
inline double two_sided_binomial_tail(std::uint64_t n, std::uint64_t m) {
  if (n <= 53) {
    // Exact: the tail count is an integer below 2^53.
    std::uint64_t coeff = 1;  // C(n, 0)
    std::uint64_t tail = 0;
    for (std::uint64_t i = 0; i <= n; ++i) {
      if (i >= m) tail += coeff;
      if (i < n) coeff = coeff * (n - i) / (i + 1);
    }
    return std::min(1.0, std::ldexp(static_cast<double>(tail), 1 - static_cast<int>(n)));
  }
  const double ln2 = std::log(2.0);
  const double lfn = std::lgamma(static_cast<double>(n) + 1.0);
  std::vector<double> logs;
  for (std::uint64_t i = m; i <= n; ++i) {
    logs.push_back(lfn - std::lgamma(static_cast<double>(i) + 1.0) -
                   std::lgamma(static_cast<double>(n - i) + 1.0) - static_cast<double>(n) * ln2);
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - top);
  return std::min(1.0, 2.0 * std::exp(top) * sum);
}

}  // namespace detail

// Two-sided micro-sign test on paired per-vertex correctness. Only vertices
// where exactly one method is right count.
inline double micro_sign_test(const std::vector<bool>& correct_a, const std::vector<bool>& correct_b) {
  if (correct_a.size() != correct_b.size()) {
    throw ValidationError(detail::concat("sign test inputs differ in length: ", correct_a.size(),
                                         " vs ", correct_b.size()));
  }
  std::uint64_t n = 0;
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < correct_a.size(); ++i) {
    if (correct_a[i] != correct_b[i]) {
      ++n;
      if (correct_a[i]) ++s;
    }
  }
  if (n == 0) return 1.0;
  return detail::two_sided_binomial_tail(n, std::max(s, n - s));
}

// ---------------------------------------------------------------------------
// Methods and plans

enum class MethodKind { kSpread, kPropagate };

inline const char* to_string(MethodKind k) { return k == MethodKind::kSpread ? "spread" : "propagate"; }

struct MethodSpec {
  std::string name;
  MethodKind kind = MethodKind::kSpread;
  std::vector<std::size_t> motifs{2};
  // Fixed weights aligned with `motifs`; ignored when `tune` is set.
  std::vector<double> alphas{1.0};
  // Grid-search the weights of the non-edge motifs in steps of 0.1.
  bool tune = false;
};

// Weight grid over `motifs` (which must contain 2): every non-edge motif
// takes a weight in {0, 0.1, ..., 0.9}, edges receive the remainder, which
// must be at least 0.1. With `include_edge_only` false the all-zero point
// (plain edges) is skipped.
inline std::vector<MotifPlan> tenth_grid_plans(std::span<const std::size_t> motifs,
                                               bool include_edge_only) {
  std::vector<std::size_t> others;
  bool has_edges = false;
  for (auto k : motifs) {
    if (k == 2) {
      has_edges = true;
    } else {
      others.push_back(k);
    }
  }
  if (!has_edges) throw ValidationError("weight tuning needs the edge motif (2) in the motif set");
  std::vector<MotifPlan> plans;
  std::vector<int> tenths(others.size(), 0);
  auto emit = [&] {
    int used = 0;
    for (int t : tenths) used += t;
    if (used > 9) return;
    if (used == 0 && !include_edge_only) return;
    std::vector<std::size_t> sizes{2};
    std::vector<double> alphas{static_cast<double>(10 - used) / 10.0};
    for (std::size_t i = 0; i < others.size(); ++i) {
      sizes.push_back(others[i]);
      alphas.push_back(static_cast<double>(tenths[i]) / 10.0);
    }
    plans.push_back(MotifPlan::from_weights(sizes, alphas));
  };
  while (true) {
    emit();
    std::size_t i = 0;
    while (i < tenths.size() && tenths[i] == 9) tenths[i++] = 0;
    if (i == tenths.size()) break;
    ++tenths[i];
  }
  return plans;
}

inline std::vector<MotifPlan> candidate_plans(const MethodSpec& m) {
  if (m.tune) return tenth_grid_plans(m.motifs, false);
  return {MotifPlan::from_weights(m.motifs, m.alphas)};
}

// ---------------------------------------------------------------------------
// Shared evaluation machinery

struct Dataset {
  Graph graph;
  VertexIdMap ids;
  LabelAssignment truth;
};

struct PhaseTimes {
  double enumeration_seconds = 0.0;
  double operator_seconds = 0.0;
  double solve_seconds = 0.0;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

struct PlanRun {
  double accuracy = 0.0;
  std::vector<bool> correct;
  bool converged = false;
  std::size_t iterations = 0;
};

// Caches participation matrices per clique size and operators per plan, and
// scores a (plan, method kind) on a seed set.
class PlanEvaluator {
 public:
  PlanEvaluator(const Dataset& data, SolverConfig solver, EnumerationOptions enumeration = {})
      : data_(&data), solver_(solver), enumeration_(enumeration) {
    solver_.validate();
  }

  const PropagationOperator& operator_for(const MotifPlan& plan) {
    const auto key = plan.to_string();
    if (const auto it = operators_.find(key); it != operators_.end()) return it->second;
    for (auto k : plan.clique_sizes()) {
      const bool have = std::any_of(pool_.begin(), pool_.end(),
                                    [k](const ParticipationMatrix& p) { return p.clique_size == k; });
      if (have) continue;
      detail::Stopwatch sw;
      pool_.push_back(build_participation(data_->graph, k, enumeration_));
      times_.enumeration_seconds += sw.seconds();
    }
    detail::Stopwatch sw;
    auto op = combine_from_pool(pool_, plan);
    times_.operator_seconds += sw.seconds();
    return operators_.emplace(key, std::move(op)).first->second;
  }

  PlanRun evaluate(const MotifPlan& plan, MethodKind kind, std::span<const VertexId> seeds) {
    const auto& op = operator_for(plan);
    const auto given = data_->truth.restricted_to(seeds);
    const auto prior = prior_from_labels(given);
    detail::Stopwatch sw;
    const auto result = kind == MethodKind::kSpread ? spread(op, prior, solver_)
                                                    : label_propagation(op, prior, seeds, solver_);
    const auto hard = harden(result.soft, &given);
    times_.solve_seconds += sw.seconds();
    PlanRun run;
    run.correct = correctness(hard.labels, data_->truth, seeds);
    if (run.correct.empty()) throw ValidationError("accuracy over an empty evaluation set");
    run.accuracy = static_cast<double>(std::count(run.correct.begin(), run.correct.end(), true)) /
                   static_cast<double>(run.correct.size());
    run.converged = result.converged;
    run.iterations = result.iterations;
    return run;
  }

  const PhaseTimes& times() const { return times_; }
  PhaseTimes take_times() { return std::exchange(times_, PhaseTimes{}); }

 private:
  const Dataset* data_;
  SolverConfig solver_;
  EnumerationOptions enumeration_;
  std::vector<ParticipationMatrix> pool_;
  std::map<std::string, PropagationOperator> operators_;
  PhaseTimes times_;
};

inline double mean_of(std::span<const std::optional<double>> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

// (acc - reference) / reference; infinite when the reference is zero and
// the accuracy is not.
inline double relative_gain(double acc, double reference) {
  if (reference == 0.0) {
    return acc == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), acc);
  }
  return (acc - reference) / reference;
}

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentConfig {
  std::string graph_path;
  std::string labels_path;
  bool weighted = false;
  bool one_based = false;
  std::optional<std::size_t> num_classes;
  std::size_t num_seeds = 20;
  std::size_t runs = 5;
  std::uint64_t seed = 1;
  SolverConfig solver;
  std::vector<MethodSpec> methods;
  double significance = 0.05;
  EnumerationOptions enumeration;
  // Optional sweeps run by the bench command.
  std::vector<double> sweep_alphas;
  std::vector<std::size_t> sweep_max_cliques;

  void validate(std::size_t num_classes_in_data) const {
    solver.validate();
    if (runs < 1) throw ValidationError("runs must be >= 1");
    if (num_seeds < num_classes_in_data) {
      throw ValidationError(detail::concat("num_seeds ", num_seeds, " is smaller than the ",
                                           num_classes_in_data, " classes"));
    }
    if (methods.empty()) throw ValidationError("no methods to compare");
    for (std::size_t i = 0; i < methods.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (methods[i].name == methods[j].name) {
          throw ValidationError(detail::concat("method name '", methods[i].name, "' used twice"));
        }
      }
    }
    if (!(significance > 0.0 && significance < 1.0)) {
      throw ValidationError("significance level must lie in (0, 1)");
    }
  }
};

inline Dataset load_dataset(const ExperimentConfig& cfg) {
  std::ifstream gin(cfg.graph_path);
  if (!gin) throw ValidationError("cannot open graph file " + cfg.graph_path);
  auto loaded = load_edge_list(gin, {cfg.weighted});
  std::ifstream lin(cfg.labels_path);
  if (!lin) throw ValidationError("cannot open label file " + cfg.labels_path);
  auto truth = load_labels(lin, loaded.ids, {cfg.num_classes, cfg.one_based});
  if (const auto v = truth.first_unlabeled()) {
    throw ValidationError(detail::concat("vertex ", loaded.ids.to_external(*v),
                                         " has no ground-truth label"));
  }
  return {std::move(loaded.graph), std::move(loaded.ids), std::move(truth)};
}

struct PlanOutcome {
  MotifPlan plan;
  std::vector<std::optional<double>> accuracies;  // per run; nullopt if the run failed
  double mean_accuracy = 0.0;
};

struct MethodReport {
  std::string name;
  MethodKind kind = MethodKind::kSpread;
  bool tuned = false;
  std::vector<PlanOutcome> grid;
  std::size_t chosen = 0;
  double solve_seconds = 0.0;

  const PlanOutcome& best() const { return grid.at(chosen); }
};

struct PairReport {
  std::string first;
  std::string second;
  std::vector<std::optional<double>> p_values;
  std::size_t significant_runs = 0;
  // Significant in a strict majority of the runs.
  bool significant = false;
};

struct Report {
  std::size_t num_vertices = 0;
  std::size_t num_edges = 0;
  std::size_t num_classes = 0;
  std::size_t num_seeds = 0;
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  SolverConfig solver;
  double significance = 0.05;
  std::vector<MethodReport> methods;
  std::vector<PairReport> pairs;
  std::vector<std::optional<std::string>> run_errors;
  PhaseTimes times;

  std::size_t failed_runs() const {
    return static_cast<std::size_t>(std::count_if(run_errors.begin(), run_errors.end(),
                                                  [](const auto& e) { return e.has_value(); }));
  }
  const MethodReport* method(const std::string& name) const {
    for (const auto& m : methods) {
      if (m.name == name) return &m;
    }
    return nullptr;
  }
};

// Every method sees the identical seed set within a run. A run that throws is
// recorded as failed and the remaining runs continue.
inline Report run_experiment(const Dataset& data, const ExperimentConfig& cfg,
                             const std::vector<std::vector<VertexId>>& seed_sets) {
  cfg.validate(data.truth.num_classes());
  Report report;
  report.num_vertices = data.graph.num_vertices();
  report.num_edges = data.graph.num_edges();
  report.num_classes = data.truth.num_classes();
  report.num_seeds = cfg.num_seeds;
  report.runs = seed_sets.size();
  report.seed = cfg.seed;
  report.solver = cfg.solver;
  report.significance = cfg.significance;

  PlanEvaluator evaluator(data, cfg.solver, cfg.enumeration);
  std::vector<std::vector<MotifPlan>> plans;
  for (const auto& m : cfg.methods) {
    plans.push_back(candidate_plans(m));
    MethodReport mr;
    mr.name = m.name;
    mr.kind = m.kind;
    mr.tuned = m.tune;
    for (const auto& p : plans.back()) mr.grid.push_back({p, {}, 0.0});
    report.methods.push_back(std::move(mr));
  }
  // flags[method][plan][run]
  std::vector<std::vector<std::vector<std::vector<bool>>>> flags(cfg.methods.size());
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    flags[m].assign(plans[m].size(), std::vector<std::vector<bool>>(seed_sets.size()));
  }

  for (std::size_t r = 0; r < seed_sets.size(); ++r) {
    std::vector<std::vector<std::optional<double>>> accs(cfg.methods.size());
    try {
      for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        for (std::size_t p = 0; p < plans[m].size(); ++p) {
          const double before = evaluator.times().solve_seconds;
          auto run = evaluator.evaluate(plans[m][p], cfg.methods[m].kind, seed_sets[r]);
          report.methods[m].solve_seconds += evaluator.times().solve_seconds - before;
          accs[m].push_back(run.accuracy);
          flags[m][p][r] = std::move(run.correct);
        }
      }
      report.run_errors.emplace_back(std::nullopt);
    } catch (const std::exception& e) {
      report.run_errors.emplace_back(e.what());
      for (auto& a : accs) a.assign(a.size(), std::nullopt);
    }
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      for (std::size_t p = 0; p < plans[m].size(); ++p) {
        report.methods[m].grid[p].accuracies.push_back(p < accs[m].size() ? accs[m][p]
                                                                          : std::nullopt);
      }
    }
  }

  for (auto& mr : report.methods) {
    for (auto& outcome : mr.grid) outcome.mean_accuracy = mean_of(outcome.accuracies);
    mr.chosen = 0;
    for (std::size_t p = 1; p < mr.grid.size(); ++p) {
      if (mr.grid[p].mean_accuracy > mr.grid[mr.chosen].mean_accuracy) mr.chosen = p;
    }
  }

  for (std::size_t a = 0; a < cfg.methods.size(); ++a) {
    for (std::size_t b = a + 1; b < cfg.methods.size(); ++b) {
      PairReport pr{cfg.methods[a].name, cfg.methods[b].name, {}, 0, false};
      for (std::size_t r = 0; r < seed_sets.size(); ++r) {
        if (report.run_errors[r]) {
          pr.p_values.emplace_back(std::nullopt);
          continue;
        }
        const double p = micro_sign_test(flags[a][report.methods[a].chosen][r],
                                         flags[b][report.methods[b].chosen][r]);
        pr.p_values.emplace_back(p);
        if (p < cfg.significance) ++pr.significant_runs;
      }
      pr.significant = 2 * pr.significant_runs > seed_sets.size();
      report.pairs.push_back(std::move(pr));
    }
  }
  report.times = evaluator.times();
  return report;
}

inline Report run_experiment(const Dataset& data, const ExperimentConfig& cfg) {
  cfg.validate(data.truth.num_classes());
  return run_experiment(data, cfg,
                        draw_seed_sets(data.truth, cfg.num_seeds, cfg.runs, cfg.seed));
}

inline Report run_experiment(const ExperimentConfig& cfg) { return run_experiment(load_dataset(cfg), cfg); }

// ---------------------------------------------------------------------------
// Sweeps

struct AlphaSweepRow {
  double alpha = 0.0;
  std::vector<double> accuracies;
  double mean_accuracy = 0.0;
  double gain = 0.0;  // relative to edges only
};

// Accuracy of {K2: 1 - a, K3: a} for each a, on shared seed sets.
inline std::vector<AlphaSweepRow> sweep_alpha(const Dataset& data, const SolverConfig& solver,
                                              const std::vector<std::vector<VertexId>>& seed_sets,
                                              std::span<const double> alphas,
                                              const EnumerationOptions& enumeration = {}) {
  PlanEvaluator evaluator(data, solver, enumeration);
  auto evaluate = [&](const MotifPlan& plan) {
    std::vector<double> accs;
    for (const auto& seeds : seed_sets) {
      accs.push_back(evaluator.evaluate(plan, MethodKind::kSpread, seeds).accuracy);
    }
    return accs;
  };
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  const double reference = mean(evaluate(MotifPlan::edges_only()));
  std::vector<AlphaSweepRow> rows;
  for (double a : alphas) {
    if (!(a >= 0.0 && a < 1.0)) throw ValidationError(detail::concat("triangle weight ", a, " outside [0, 1)"));
    AlphaSweepRow row;
    row.alpha = a;
    row.accuracies = evaluate(MotifPlan::edges_and_triangles(a));
    row.mean_accuracy = mean(row.accuracies);
    row.gain = relative_gain(row.mean_accuracy, reference);
    rows.push_back(std::move(row));
  }
  return rows;
}

struct CliqueSweepRow {
  std::size_t max_clique = 2;
  MotifPlan best_plan;
  double mean_accuracy = 0.0;
  double gain = 0.0;  // relative to k = 2
  std::size_t plans_tried = 0;
};

// For K = {K2..Kk}, the best mean accuracy over the 0.1-step weight grid
// with at least 0.1 on edges.
inline std::vector<CliqueSweepRow> sweep_max_clique(const Dataset& data, const SolverConfig& solver,
                                                    const std::vector<std::vector<VertexId>>& seed_sets,
                                                    std::span<const std::size_t> k_values,
                                                    const EnumerationOptions& enumeration = {}) {
  PlanEvaluator evaluator(data, solver, enumeration);
  auto mean_accuracy = [&](const MotifPlan& plan) {
    double s = 0.0;
    for (const auto& seeds : seed_sets) s += evaluator.evaluate(plan, MethodKind::kSpread, seeds).accuracy;
    return seed_sets.empty() ? 0.0 : s / static_cast<double>(seed_sets.size());
  };
  const double reference = mean_accuracy(MotifPlan::edges_only());
  std::vector<CliqueSweepRow> rows;
  for (auto k : k_values) {
    if (k < 2) throw ValidationError(detail::concat("maximum clique size must be >= 2, got ", k));
    std::vector<std::size_t> motifs;
    for (std::size_t j = 2; j <= k; ++j) motifs.push_back(j);
    const auto plans = tenth_grid_plans(motifs, true);
    CliqueSweepRow row;
    row.max_clique = k;
    row.plans_tried = plans.size();
    row.best_plan = plans.front();
    row.mean_accuracy = -1.0;
    for (const auto& plan : plans) {
      const double acc = mean_accuracy(plan);
      if (acc > row.mean_accuracy) {
        row.mean_accuracy = acc;
        row.best_plan = plan;
      }
    }
    row.gain = relative_gain(row.mean_accuracy, reference);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

namespace detail {

inline nlohmann::ordered_json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline nlohmann::ordered_json optional_or_null(const std::optional<double>& v) {
  if (!v) return nullptr;
  return number_or_null(*v);
}

}  // namespace detail

// Machine-readable report. Wall-clock timings are included only on request
// so that seeded reruns produce identical files.
inline nlohmann::ordered_json to_json(const Report& report, bool with_timings) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["graph"] = {{"num_vertices", report.num_vertices},
                {"num_edges", report.num_edges},
                {"num_classes", report.num_classes}};
  j["protocol"] = {{"num_seeds", report.num_seeds},
                   {"runs", report.runs},
                   {"seed", report.seed},
                   {"eta", report.solver.eta},
                   {"epsilon", report.solver.epsilon},
                   {"max_iters", report.solver.max_iters},
                   {"significance", report.significance}};
  j["methods"] = ordered_json::array();
  for (const auto& m : report.methods) {
    ordered_json mj;
    mj["name"] = m.name;
    mj["kind"] = to_string(m.kind);
    mj["tuned"] = m.tuned;
    mj["plan"] = m.best().plan.to_string();
    mj["mean_accuracy"] = detail::number_or_null(m.best().mean_accuracy);
    mj["accuracies"] = ordered_json::array();
    for (const auto& a : m.best().accuracies) mj["accuracies"].push_back(detail::optional_or_null(a));
    if (m.grid.size() > 1) {
      mj["grid"] = ordered_json::array();
      for (const auto& g : m.grid) {
        mj["grid"].push_back({{"plan", g.plan.to_string()},
                              {"mean_accuracy", detail::number_or_null(g.mean_accuracy)}});
      }
    }
    if (with_timings) mj["solve_seconds"] = m.solve_seconds;
    j["methods"].push_back(std::move(mj));
  }
  j["comparisons"] = ordered_json::array();
  for (const auto& p : report.pairs) {
    ordered_json pj;
    pj["first"] = p.first;
    pj["second"] = p.second;
    pj["p_values"] = ordered_json::array();
    for (const auto& v : p.p_values) pj["p_values"].push_back(detail::optional_or_null(v));
    pj["significant_runs"] = p.significant_runs;
    pj["significant"] = p.significant;
    j["comparisons"].push_back(std::move(pj));
  }
  j["failed_runs"] = ordered_json::array();
  for (std::size_t r = 0; r < report.run_errors.size(); ++r) {
    if (report.run_errors[r]) j["failed_runs"].push_back({{"run", r}, {"error", *report.run_errors[r]}});
  }
  if (with_timings) {
    j["timings"] = {{"enumeration_seconds", report.times.enumeration_seconds},
                    {"operator_seconds", report.times.operator_seconds},
                    {"solve_seconds", report.times.solve_seconds}};
  }
  return j;
}

// Aligned text table: one row per method with mean accuracy (an asterisk
// marks a significant difference to the runner-up) and optionally time.
inline void write_report_table(std::ostream& out, const Report& report, bool with_timings) {
  std::size_t width = 6;
  for (const auto& m : report.methods) width = std::max(width, m.name.size());
  std::vector<std::size_t> ranked(report.methods.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i] = i;
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    return report.methods[a].best().mean_accuracy > report.methods[b].best().mean_accuracy;
  });
  std::optional<std::size_t> starred;
  if (ranked.size() >= 2) {
    const auto& top = report.methods[ranked[0]].name;
    const auto& runner = report.methods[ranked[1]].name;
    for (const auto& p : report.pairs) {
      if (((p.first == top && p.second == runner) || (p.first == runner && p.second == top)) &&
          p.significant) {
        starred = ranked[0];
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-*s  %-10s  %-18s", static_cast<int>(width), "Method", "Accuracy",
                "Plan");
  out << buf;
  if (with_timings) out << "  Solve(s)";
  out << '\n';
  for (std::size_t i = 0; i < report.methods.size(); ++i) {
    const auto& m = report.methods[i];
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.4f%s", m.best().mean_accuracy, starred == i ? "*" : "");
    std::snprintf(buf, sizeof buf, "%-*s  %-10s  %-18s", static_cast<int>(width), m.name.c_str(), acc,
                  m.best().plan.to_string().c_str());
    out << buf;
    if (with_timings) {
      std::snprintf(buf, sizeof buf, "  %.3f", m.solve_seconds);
      out << buf;
    }
    out << '\n';
  }
  if (report.failed_runs() > 0) out << report.failed_runs() << " of " << report.runs << " runs failed\n";
}

inline void write_alpha_sweep_csv(std::ostream& out, std::span<const AlphaSweepRow> rows) {
  out << "alpha_k3,mean_accuracy,gain_over_ls";
  const std::size_t runs = rows.empty() ? 0 : rows.front().accuracies.size();
  for (std::size_t r = 0; r < runs; ++r) out << ",run_" << r;
  out << '\n';
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%.2f,%.6f,%.6f", row.alpha, row.mean_accuracy, row.gain);
    out << buf;
    for (double a : row.accuracies) {
      std::snprintf(buf, sizeof buf, ",%.6f", a);
      out << buf;
    }
    out << '\n';
  }
}

inline void write_clique_sweep_csv(std::ostream& out, std::span<const CliqueSweepRow> rows) {
  out << "max_clique,best_plan,mean_accuracy,gain_over_k2,plans_tried\n";
  char buf[64];
  for (const auto& row : rows) {
    out << row.max_clique << ",\"" << row.best_plan.to_string() << '"';
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%zu", row.mean_accuracy, row.gain, row.plans_tried);
    out << buf << '\n';
  }
}

// ---------------------------------------------------------------------------
// Experiment config files
//
//   # comment
//   graph      = polblogs.edges        (relative to the config file)
//   labels     = polblogs.labels
//   one_based  = false
//   weighted   = false
//   num_classes = 2                    (optional)
//   num_seeds  = 20
//   runs       = 5
//   seed       = 7
//   eta        = 0.5
//   epsilon    = 1e-6
//   max_iters  = 500
//   significance = 0.05
//   max_clique = 8
//   method     = LS   spread    2     1.0
//   method     = HOLS spread    2,3   tune
//   method     = LP   propagate 2     1.0
//   sweep_alpha = 0,0.1,0.2           (optional)
//   sweep_max_clique = 2,3,4          (optional)

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(sep, start);
    const auto end = pos == std::string_view::npos ? s.size() : pos;
    auto item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_real(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ParseError(line, "invalid number '" + s + "'");
  }
  return v;
}

inline std::uint64_t parse_count(const std::string& s, std::size_t line) {
  return parse_id(s, line, "integer");
}

inline bool parse_bool(const std::string& s, std::size_t line) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ParseError(line, "invalid boolean '" + s + "'");
}

}  // namespace detail

inline std::vector<std::size_t> parse_size_list(const std::string& s, std::size_t line = 0) {
  std::vector<std::size_t> out;
  for (const auto& item : detail::split_list(s, ',')) out.push_back(detail::parse_count(item, line));
  return out;
}

inline std::vector<double> parse_real_list(const std::string& s, std::size_t line = 0) {
  std::vector<double> out;
  for (const auto& item : detail::split_list(s, ',')) out.push_back(detail::parse_real(item, line));
  return out;
}

inline ExperimentConfig parse_experiment_config(std::istream& in,
                                                const std::filesystem::path& base_dir = {}) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return (path.is_absolute() || base_dir.empty() ? path : base_dir / path).string();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    const auto key = detail::trim(std::string_view(line).substr(0, eq));
    const auto value = detail::trim(std::string_view(line).substr(eq + 1));
    if (key == "graph") {
      cfg.graph_path = resolve(value);
    } else if (key == "labels") {
      cfg.labels_path = resolve(value);
    } else if (key == "one_based") {
      cfg.one_based = detail::parse_bool(value, line_no);
    } else if (key == "weighted") {
      cfg.weighted = detail::parse_bool(value, line_no);
    } else if (key == "num_classes") {
      cfg.num_classes = detail::parse_count(value, line_no);
    } else if (key == "num_seeds") {
      cfg.num_seeds = detail::parse_count(value, line_no);
    } else if (key == "runs") {
      cfg.runs = detail::parse_count(value, line_no);
    } else if (key == "seed") {
      cfg.seed = detail::parse_count(value, line_no);
    } else if (key == "eta") {
      cfg.solver.eta = detail::parse_real(value, line_no);
    } else if (key == "epsilon") {
      cfg.solver.epsilon = detail::parse_real(value, line_no);
    } else if (key == "max_iters") {
      cfg.solver.max_iters = detail::parse_count(value, line_no);
    } else if (key == "significance") {
      cfg.significance = detail::parse_real(value, line_no);
    } else if (key == "max_clique") {
      cfg.enumeration.max_clique_size = detail::parse_count(value, line_no);
    } else if (key == "method") {
      const auto tokens = detail::split_ws(value);
      if (tokens.size() != 4) throw ParseError(line_no, "expected 'method = NAME KIND MOTIFS ALPHAS|tune'");
      MethodSpec m;
      m.name = std::string(tokens[0]);
      if (tokens[1] == "spread") {
        m.kind = MethodKind::kSpread;
      } else if (tokens[1] == "propagate") {
        m.kind = MethodKind::kPropagate;
      } else {
        throw ParseError(line_no, "method kind must be 'spread' or 'propagate'");
      }
      m.motifs = parse_size_list(std::string(tokens[2]), line_no);
      if (tokens[3] == "tune") {
        m.tune = true;
        m.alphas.clear();
      } else {
        m.alphas = parse_real_list(std::string(tokens[3]), line_no);
      }
      try {
        candidate_plans(m);
      } catch (const ValidationError& e) {
        throw ParseError(line_no, e.what());
      }
      cfg.methods.push_back(std::move(m));
    } else if (key == "sweep_alpha") {
      cfg.sweep_alphas = parse_real_list(value, line_no);
    } else if (key == "sweep_max_clique") {
      cfg.sweep_max_cliques = parse_size_list(value, line_no);
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  if (cfg.graph_path.empty()) throw ParseError(line_no, "missing 'graph'");
  if (cfg.labels_path.empty()) throw ParseError(line_no, "missing 'labels'");
  if (cfg.methods.empty()) throw ParseError(line_no, "no 'method' lines");
  return cfg;
}

}  // namespace hols
