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

#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hols/common.hpp"
#include "hols/graph.hpp"
#include "hols/participation.hpp"

namespace hols {

// N x C score matrix. Priors hold one-hot rows for labeled vertices and zero
// rows elsewhere.
using SoftLabels = DenseMatrix;

inline SoftLabels prior_from_labels(const LabelAssignment& labels) {
  SoftLabels y(labels.num_vertices(), labels.num_classes());
  for (VertexId v = 0; v < labels.num_vertices(); ++v) {
    if (const auto c = labels.get(v)) y(v, *c) = 1.0;
  }
  return y;
}

struct SolverConfig {
  double eta = 0.5;
  double epsilon = 1e-6;
  std::size_t max_iters = 500;

  void validate() const {
    if (!(eta > 0.0 && eta < 1.0)) {
      throw ValidationError(detail::concat("eta must lie strictly inside (0, 1), got ", eta));
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
      throw ValidationError(detail::concat("epsilon must be finite and >= 0, got ", epsilon));
    }
    if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
  }
};

struct SpreadResult {
  SoftLabels soft;
  std::size_t iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  // Max-abs change of every iteration, in order.
  std::vector<double> residuals;
};

namespace detail {

inline void check_prior(const PropagationOperator& op, const SoftLabels& y) {
  if (y.rows() != op.dimension()) {
    throw ValidationError(concat("prior has ", y.rows(), " rows, operator has dimension ",
                                 op.dimension()));
  }
}

inline void check_finite(const SoftLabels& x, std::size_t iteration) {
  if (!x.all_finite()) {
    throw NumericError(concat("non-finite score encountered at iteration ", iteration));
  }
}

}  // namespace detail

// Iterates X <- eta * S X + (1 - eta) * Y until the largest entry change
// drops below epsilon or max_iters updates have been made.
inline SpreadResult spread(const PropagationOperator& op, const SoftLabels& prior,
                           const SolverConfig& cfg,
                           const std::optional<SoftLabels>& initial = std::nullopt) {
  cfg.validate();
  detail::check_prior(op, prior);
  SpreadResult result;
  SoftLabels x = initial ? *initial : prior;
  if (x.rows() != prior.rows() || x.cols() != prior.cols()) {
    throw ValidationError("initial scores do not match the prior's shape");
  }
  detail::check_finite(x, 0);
  SoftLabels next;
  const double keep = 1.0 - cfg.eta;
  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    op.apply(x, next);
    auto nv = next.values();
    const auto yv = prior.values();
    for (std::size_t i = 0; i < nv.size(); ++i) nv[i] = cfg.eta * nv[i] + keep * yv[i];
    detail::check_finite(next, t);
    const double residual = max_abs_diff(next, x);
    std::swap(x, next);
    result.iterations = t;
    result.final_residual = residual;
    result.residuals.push_back(residual);
    if (residual < cfg.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.soft = std::move(x);
  return result;
}

inline constexpr std::size_t kDefaultDenseCap = 2000;

// Solves (I - eta S) X = (1 - eta) Y densely. Meant as a reference for
// small graphs.
inline SoftLabels closed_form(const PropagationOperator& op, const SoftLabels& prior, double eta,
                              std::size_t dense_cap = kDefaultDenseCap) {
  SolverConfig{eta, 0.0, 1}.validate();
  detail::check_prior(op, prior);
  const std::size_t n = op.dimension();
  if (n > dense_cap) {
    throw CapacityError(detail::concat("dense solve refuses N=", n, " above the cap of ", dense_cap));
  }
  const std::size_t c = prior.cols();
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                     static_cast<Eigen::Index>(n));
  const auto& s = op.normalized();
  for (std::size_t i = 0; i < n; ++i) {
    const auto cols = s.row_columns(i);
    const auto vals = s.row_values(i);
    for (std::size_t e = 0; e < cols.size(); ++e) {
      system(static_cast<Eigen::Index>(i), cols[e]) -= eta * vals[e];
    }
  }
  Eigen::MatrixXd rhs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      rhs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (1.0 - eta) * prior(i, j);
    }
  }
  // I - eta S has spectrum in [1 - eta, 1 + eta], so partial pivoting is enough.
  const Eigen::MatrixXd sol = n > 0 ? Eigen::MatrixXd(system.partialPivLu().solve(rhs)) : rhs;
  SoftLabels x(n, c);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      x(i, j) = sol(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  if (!x.all_finite()) throw NumericError("dense solve produced non-finite scores");
  return x;
}

// Harmonic-function baseline: X <- D'^-1 W' X with labeled rows clamped to Y.
inline SpreadResult label_propagation(const PropagationOperator& op, const SoftLabels& prior,
                                      std::span<const VertexId> labeled, const SolverConfig& cfg) {
  cfg.validate();
  detail::check_prior(op, prior);
  if (labeled.empty()) throw ValidationError("label propagation needs at least one labeled vertex");
  for (auto v : labeled) {
    if (v >= op.dimension()) throw ValidationError(detail::concat("labeled vertex ", v, " out of range"));
  }
  SpreadResult result;
  SoftLabels x = prior;
  SoftLabels next;
  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    op.apply_random_walk(x, next);
    for (auto v : labeled) {
      const auto src = prior.row(v);
      std::copy(src.begin(), src.end(), next.row(v).begin());
    }
    detail::check_finite(next, t);
    const double residual = max_abs_diff(next, x);
    std::swap(x, next);
    result.iterations = t;
    result.final_residual = residual;
    result.residuals.push_back(residual);
    if (residual < cfg.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.soft = std::move(x);
  return result;
}

struct HardenedLabels {
  LabelAssignment labels;
  // Vertices whose row had a tied maximum (all-zero rows included).
  std::vector<VertexId> ties;
};

// Per-row argmax; ties go to the lowest class. Vertices labeled in
// `overrides` keep their given class.
inline HardenedLabels harden(const SoftLabels& x, const LabelAssignment* overrides = nullptr) {
  if (!x.all_finite()) throw NumericError("cannot harden non-finite scores");
  HardenedLabels out{LabelAssignment(x.rows(), x.cols()), {}};
  if (x.cols() == 0) return out;
  for (VertexId v = 0; v < x.rows(); ++v) {
    if (overrides != nullptr) {
      if (const auto c = overrides->get(v)) {
        out.labels.set(v, *c);
        continue;
      }
    }
    const auto row = x.row(v);
    ClassId best = 0;
    bool tie = false;
    for (ClassId c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) {
        best = c;
        tie = false;
      } else if (row[c] == row[best]) {
        tie = true;
      }
    }
    if (tie || row[best] == 0.0) out.ties.push_back(v);
    out.labels.set(v, best);
  }
  return out;
}

inline nlohmann::ordered_json to_json(const SpreadResult& r) {
  nlohmann::ordered_json j;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["residual"] = r.final_residual;
  return j;
}

// Soft scores as CSV: one row per vertex, one column per class.
inline void write_scores_csv(std::ostream& out, const SoftLabels& x, const VertexIdMap& ids) {
  out << "vertex";
  for (std::size_t c = 0; c < x.cols(); ++c) out << ",class_" << c;
  out << '\n';
  char buf[32];
  for (VertexId v = 0; v < x.rows(); ++v) {
    out << ids.to_external(v);
    for (double s : x.row(v)) {
      std::snprintf(buf, sizeof buf, "%.17g", s);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace hols
