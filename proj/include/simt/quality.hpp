// include/simt/quality.hpp

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

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "simt/core.hpp"

namespace simt::quality {

inline constexpr std::size_t kMaxOrder = 4;

/// Clipped n-gram matches and hypothesis n-gram totals for orders 1..4,
/// plus the two lengths the brevity penalty needs.
struct BleuStats {
  std::array<std::size_t, kMaxOrder> matches{};
  std::array<std::size_t, kMaxOrder> totals{};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other);
};

BleuStats collect_stats(std::span<const std::string> hyp,
                        std::span<const std::string> ref);

/// Case-sensitive BLEU-4 in [0, 100]. Zero-match orders n >= 2 are smoothed
/// to 1 / (total + 1). Empty reference throws; empty hypothesis scores 0.
double sentence_bleu(std::span<const std::string> hyp,
                     std::span<const std::string> ref);

using TokenPair = std::pair<std::vector<std::string>, std::vector<std::string>>;

/// Classic corpus BLEU over pooled counts; any order without a match gives 0.
double corpus_bleu(std::span<const TokenPair> pairs);

// ─── Custom metrics ─────────────────────────────────────────────────────────

struct MetricInput {
  std::span<const std::string> hypothesis;
  std::span<const std::string> reference;
  std::span<const double> delays;
  std::span<const double> durations;  // served T_j, empty for text
  DataKind kind = DataKind::Text;
  double source_size = 0;             // |X| or total ms
};

struct MetricPlugin {
  std::string name;
  std::function<double(const MetricInput&)> fn;
};

class MetricRegistry {
 public:
  /// Names used by the built-in sentence metrics; plugins may not reuse them.
  static constexpr std::array<std::string_view, 4> kReserved = {"BLEU", "AP",
                                                                "AL", "DAL"};

  /// Throws Error{DuplicateName} if the name is taken.
  MetricRegistry& add(MetricPlugin plugin);

  bool contains(std::string_view name) const;
  std::size_t size() const { return plugins_.size(); }
  bool empty() const { return plugins_.empty(); }

  std::map<std::string, double> evaluate(const MetricInput& input) const;

 private:
  std::vector<MetricPlugin> plugins_;
};

/// Functional-style registration: returns a registry with `plugin` added.
MetricRegistry register_metric(MetricRegistry registry, MetricPlugin plugin);

/// Plugins selectable by name from the command line.
MetricPlugin builtin_plugin(std::string_view name);
std::vector<std::string> builtin_plugin_names();

}  // namespace simt::quality
