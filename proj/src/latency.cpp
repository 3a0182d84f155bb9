// src/latency.cpp

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

#include "simt/latency.hpp"

#include <algorithm>

namespace simt::latency {
namespace {

void require_defined(std::span<const double> delays, double source_size) {
  if (delays.empty()) {
    throw Error(ErrorCode::UndefinedMetric,
                "latency is undefined for an empty hypothesis");
  }
  if (!(source_size > 0)) {
    throw Error(ErrorCode::InvalidArgument, "source size must be positive");
  }
}

double sum(std::span<const double> xs) {
  double s = 0;
  for (double x : xs) s += x;
  return s;
}

}  // namespace

double ap_text(std::span<const double> delays, double src_len) {
  require_defined(delays, src_len);
  return sum(delays) / (src_len * static_cast<double>(delays.size()));
}

double ap_speech(std::span<const double> delays, double total_duration_ms) {
  require_defined(delays, total_duration_ms);
  return sum(delays) /
         (static_cast<double>(delays.size()) * total_duration_ms);
}

double average_lagging(std::span<const double> delays, double source_size,
                       double ideal_length) {
  require_defined(delays, source_size);
  if (!(ideal_length > 0)) {
    throw Error(ErrorCode::InvalidArgument, "ideal length must be positive");
  }
  // tau: first token written with the whole source consumed; |Y| on early stop
  std::size_t tau = delays.size();
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (delays[i] >= source_size) {
      tau = i + 1;
      break;
    }
  }
  const double step = source_size / ideal_length;
  double lag = 0;
  for (std::size_t i = 0; i < tau; ++i) {
    lag += delays[i] - static_cast<double>(i) * step;
  }
  return lag / static_cast<double>(tau);
}

double al_text(std::span<const double> delays, double src_len) {
  return average_lagging(delays, src_len, static_cast<double>(delays.size()));
}

double al_speech(std::span<const double> delays, double total_duration_ms,
                 std::size_t ref_len) {
  if (ref_len == 0) {
    throw Error(ErrorCode::InvalidArgument, "reference must be non-empty");
  }
  return average_lagging(delays, total_duration_ms,
                         static_cast<double>(ref_len));
}

std::vector<double> minimum_step_delays(std::span<const double> delays,
                                        double source_size) {
  require_defined(delays, source_size);
  const double step = source_size / static_cast<double>(delays.size());
  std::vector<double> out(delays.begin(), delays.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    out[i] = std::max(delays[i], out[i - 1] + step);
  }
  return out;
}

double differentiable_average_lagging(std::span<const double> delays,
                                      double source_size) {
  const auto adjusted = minimum_step_delays(delays, source_size);
  const double step = source_size / static_cast<double>(delays.size());
  double lag = 0;
  for (std::size_t i = 0; i < adjusted.size(); ++i) {
    lag += adjusted[i] - static_cast<double>(i) * step;
  }
  return lag / static_cast<double>(adjusted.size());
}

double dal_text(std::span<const double> delays, double src_len) {
  return differentiable_average_lagging(delays, src_len);
}

double dal_speech(std::span<const double> delays, double total_duration_ms) {
  return differentiable_average_lagging(delays, total_duration_ms);
}

LatencyReport evaluate(DataKind kind, std::span<const double> delays,
                       double source_size, std::size_t ref_len) {
  LatencyReport r;
  if (delays.empty()) return r;
  if (kind == DataKind::Text) {
    r.ap = ap_text(delays, source_size);
    r.al = al_text(delays, source_size);
    r.dal = dal_text(delays, source_size);
  } else {
    r.ap = ap_speech(delays, source_size);
    r.al = al_speech(delays, source_size, ref_len);
    r.dal = dal_speech(delays, source_size);
  }
  return r;
}

}  // namespace simt::latency
