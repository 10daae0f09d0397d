// Copyright 2026 The structprobe Authors
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

// Central finite-difference check of loss_gradient, shared by the unit and
// acceptance suites.

#include <algorithm>
#include <cmath>
#include <vector>

#include "structprobe/probe.hpp"
#include "structprobe/random.hpp"

namespace gradcheck {

namespace sp = structprobe;

/// Signs of every residual feeding the batch loss, in a fixed order.
inline std::vector<int> residual_signs(const sp::ProbeParams& p, sp::ProbeBatch batch) {
  std::vector<int> signs;
  for (const auto* ex : batch) {
    if (!sp::has_targets(*ex, p.kind)) continue;
    if (p.kind == sp::ProbeKind::distance) {
      const auto pred = sp::predict_sq_distances(p, ex->embeddings);
      for (int i = 0; i < ex->size(); ++i) {
        for (int j = i + 1; j < ex->size(); ++j) {
          if (ex->distances.reachable(i, j)) signs.push_back(pred(i, j) > ex->distances.d(i, j) ? 1 : -1);
        }
      }
    } else {
      const auto pred = sp::predict_sq_depths(p, ex->embeddings);
      for (int i = 0; i < ex->size(); ++i) {
        if (ex->depths->reachable[i]) signs.push_back(pred(i) > ex->depths->depth(i) ? 1 : -1);
      }
    }
  }
  return signs;
}

struct Report {
  int checked = 0;
  int skipped_kinks = 0;
  int failures = 0;
  double max_relative_error = 0.0;
};

inline constexpr double kStep = 1e-6;
inline constexpr double kRelativeTolerance = 1e-4;
inline constexpr double kDenominatorFloor = 1e-6;

/// Compares `coordinates` random entries of the analytic gradient against
/// central differences, skipping coordinates whose ±step straddles an L1 kink.
inline Report check(const sp::ProbeParams& params, sp::ProbeBatch batch, int coordinates, std::uint64_t seed) {
  Report report;
  const Eigen::MatrixXd grad = sp::loss_gradient(params, batch);
  sp::Rng rng(seed);
  int attempts = 0;
  while (report.checked < coordinates && attempts < 20 * coordinates) {
    ++attempts;
    const auto r = static_cast<int>(rng.below(params.B.rows()));
    const auto c = static_cast<int>(rng.below(params.B.cols()));
    auto plus = params, minus = params;
    plus.B(r, c) += kStep;
    minus.B(r, c) -= kStep;
    if (residual_signs(plus, batch) != residual_signs(minus, batch)) {
      ++report.skipped_kinks;
      continue;
    }
    const double fd = (sp::batch_loss(plus, batch) - sp::batch_loss(minus, batch)) / (2 * kStep);
    const double rel =
        std::abs(fd - grad(r, c)) / std::max({std::abs(fd), std::abs(grad(r, c)), kDenominatorFloor});
    report.max_relative_error = std::max(report.max_relative_error, rel);
    if (rel > kRelativeTolerance) ++report.failures;
    ++report.checked;
  }
  return report;
}

}  // namespace gradcheck
