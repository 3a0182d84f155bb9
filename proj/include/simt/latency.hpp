// include/simt/latency.hpp

// Copyright 2026  The simt Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "simt/core.hpp"

namespace simt::latency {

// All functions throw Error{UndefinedMetric} on an empty delay list. The
// hypothesis length |Y| is the number of delays.

/// Average proportion of the source consumed per target token.
double ap_text(std::span<const double> delays, double src_len);
double ap_speech(std::span<const double> delays, double total_duration_ms);

/// Average lagging behind an ideal policy that emits `ideal_length` tokens
/// evenly over `source_size`: d*_i = (i - 1) * source_size / ideal_length.
/// Averages up to the first token written after the full source was consumed,
/// or over all tokens if the hypothesis stopped early.
double average_lagging(std::span<const double> delays, double source_size,
                       double ideal_length);

/// Text AL: ideal policy paced by the hypothesis length (gamma = |Y|/|X|).
double al_text(std::span<const double> delays, double src_len);

/// Speech AL: ideal policy paced by the reference length |Y*|, so an early
/// stopping hypothesis cannot lag "negatively".
double al_speech(std::span<const double> delays, double total_duration_ms,
                 std::size_t ref_len);

/// DAL: every token after the first incurs at least source_size/|Y| extra
/// delay over its predecessor.
double differentiable_average_lagging(std::span<const double> delays,
                                      double source_size);
double dal_text(std::span<const double> delays, double src_len);
double dal_speech(std::span<const double> delays, double total_duration_ms);

/// The d'_i sequence used by DAL.
std::vector<double> minimum_step_delays(std::span<const double> delays,
                                        double source_size);

struct LatencyReport {
  std::optional<double> ap;
  std::optional<double> al;
  std::optional<double> dal;

  bool defined() const { return ap.has_value(); }
};

/// All three metrics for one sentence; fields are absent for an empty
/// hypothesis.
LatencyReport evaluate(DataKind kind, std::span<const double> delays,
                       double source_size, std::size_t ref_len);

}  // namespace simt::latency
