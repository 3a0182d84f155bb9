// src/quality.cpp

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

#include "simt/quality.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace simt::quality {
namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

// Tokens joined with a separator that cannot occur inside a whitespace token.
NgramCounts count_ngrams(std::span<const std::string> tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += ' ';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

double brevity_penalty(std::size_t hyp_len, std::size_t ref_len) {
  if (hyp_len >= ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) /
                            static_cast<double>(hyp_len));
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < kMaxOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

BleuStats collect_stats(std::span<const std::string> hyp,
                        std::span<const std::string> ref) {
  BleuStats stats;
  stats.hyp_len = hyp.size();
  stats.ref_len = ref.size();
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    const auto hyp_counts = count_ngrams(hyp, n);
    const auto ref_counts = count_ngrams(ref, n);
    std::size_t matched = 0;
    for (const auto& [gram, count] : hyp_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    stats.matches[n - 1] = matched;
    stats.totals[n - 1] = hyp.size() >= n ? hyp.size() - n + 1 : 0;
  }
  return stats;
}

double sentence_bleu(std::span<const std::string> hyp,
                     std::span<const std::string> ref) {
  if (ref.empty()) {
    throw Error(ErrorCode::InvalidArgument, "BLEU needs a non-empty reference");
  }
  if (hyp.empty()) return 0.0;
  const auto stats = collect_stats(hyp, ref);
  if (stats.matches[0] == 0) return 0.0;
  double log_precision = 0;
  for (std::size_t n = 0; n < kMaxOrder; ++n) {
    double num = static_cast<double>(stats.matches[n]);
    double den = static_cast<double>(stats.totals[n]);
    if (n > 0 && stats.matches[n] == 0) {
      num += 1;
      den += 1;
    }
    log_precision += std::log(num / den);
  }
  return 100.0 * brevity_penalty(stats.hyp_len, stats.ref_len) *
         std::exp(log_precision / static_cast<double>(kMaxOrder));
}

double corpus_bleu(std::span<const TokenPair> pairs) {
  if (pairs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "corpus BLEU over an empty corpus");
  }
  BleuStats total;
  for (const auto& [hyp, ref] : pairs) {
    if (ref.empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  "BLEU needs non-empty references");
    }
    total += collect_stats(hyp, ref);
  }
  if (total.hyp_len == 0) return 0.0;
  double log_precision = 0;
  for (std::size_t n = 0; n < kMaxOrder; ++n) {
    if (total.matches[n] == 0) return 0.0;
    log_precision += std::log(static_cast<double>(total.matches[n]) /
                              static_cast<double>(total.totals[n]));
  }
  return 100.0 * brevity_penalty(total.hyp_len, total.ref_len) *
         std::exp(log_precision / static_cast<double>(kMaxOrder));
}

MetricRegistry& MetricRegistry::add(MetricPlugin plugin) {
  if (plugin.name.empty() || !plugin.fn) {
    throw Error(ErrorCode::InvalidArgument, "metric plugin needs name and fn");
  }
  const bool reserved = std::find(kReserved.begin(), kReserved.end(),
                                  plugin.name) != kReserved.end();
  if (reserved || contains(plugin.name)) {
    throw Error(ErrorCode::DuplicateName,
                "metric '" + plugin.name + "' is already registered");
  }
  plugins_.push_back(std::move(plugin));
  return *this;
}

bool MetricRegistry::contains(std::string_view name) const {
  return std::any_of(plugins_.begin(), plugins_.end(),
                     [&](const MetricPlugin& p) { return p.name == name; });
}

std::map<std::string, double> MetricRegistry::evaluate(
    const MetricInput& input) const {
  std::map<std::string, double> out;
  for (const auto& p : plugins_) out[p.name] = p.fn(input);
  return out;
}

MetricRegistry register_metric(MetricRegistry registry, MetricPlugin plugin) {
  registry.add(std::move(plugin));
  return registry;
}

MetricPlugin builtin_plugin(std::string_view name) {
  if (name == "hyp_len") {
    return {"hyp_len", [](const MetricInput& in) {
              return static_cast<double>(in.hypothesis.size());
            }};
  }
  if (name == "ref_len") {
    return {"ref_len", [](const MetricInput& in) {
              return static_cast<double>(in.reference.size());
            }};
  }
  if (name == "length_ratio") {
    return {"length_ratio", [](const MetricInput& in) {
              return static_cast<double>(in.hypothesis.size()) /
                     static_cast<double>(in.reference.size());
            }};
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown metric plugin '" + std::string(name) + "'");
}

std::vector<std::string> builtin_plugin_names() {
  return {"hyp_len", "ref_len", "length_ratio"};
}

}  // namespace simt::quality
