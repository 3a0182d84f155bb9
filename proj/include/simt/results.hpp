// include/simt/results.hpp

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
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "simt/core.hpp"
#include "simt/quality.hpp"

namespace simt {

/// One row of instances.log.
struct EvaluationResult {
  std::size_t index = 0;
  std::vector<std::string> hypothesis;
  std::vector<double> delays;
  std::optional<std::vector<double>> durations;  // speech only
  std::vector<std::string> reference;
  std::map<std::string, double> metrics;         // BLEU, AP, AL, DAL, custom
  std::optional<std::string> error;

  bool latency_defined() const { return metrics.count("AP") > 0; }

  nlohmann::json to_json() const;
  static EvaluationResult from_json(const nlohmann::json& j);
};

struct CorpusReport {
  std::size_t num_instances = 0;
  double bleu = 0;
  std::optional<double> ap;
  std::optional<double> al;
  std::optional<double> dal;
  std::size_t num_latency_undefined = 0;
  std::size_t num_errors = 0;
  std::map<std::string, double> custom;  // unweighted means

  nlohmann::json to_json() const;
};

/// Sentence-level evaluation of a finished instance. `tokens` and `delays`
/// exclude the EOS sentinel.
EvaluationResult finalize_instance(const Instance& instance,
                                   std::vector<std::string> tokens,
                                   std::vector<double> delays,
                                   std::vector<double> durations,
                                   const quality::MetricRegistry& registry,
                                   std::optional<std::string> error = {});

/// Corpus BLEU over all rows and unweighted means of the defined sentence
/// latencies. Rows may arrive in any order.
CorpusReport aggregate_corpus(std::vector<EvaluationResult> results);

void write_scores(const std::filesystem::path& path,
                  const CorpusReport& report);

/// Append-only JSONL file; every line is flushed before append() returns.
class JsonlWriter {
 public:
  JsonlWriter() = default;
  JsonlWriter(const std::filesystem::path& path, bool append);

  void append(const nlohmann::json& row);
  void append_all(const std::vector<nlohmann::json>& rows);
  bool is_open() const { return out_.is_open(); }

 private:
  std::mutex mu_;
  std::filesystem::path path_;
  std::ofstream out_;
};

struct ResumeState {
  std::vector<EvaluationResult> completed;
  std::set<std::size_t> pending;
};

/// Parses `output_dir/instances.log` if present. A trailing line that does
/// not parse was cut mid-write: it is dropped and the file truncated to the
/// last good row. Corruption before the last line is an error.
ResumeState resume(const std::filesystem::path& output_dir,
                   std::size_t num_instances);

inline constexpr const char* kInstancesLog = "instances.log";
inline constexpr const char* kScoresFile = "scores.json";
inline constexpr const char* kConfigFile = "config.json";
inline constexpr const char* kTraceLog = "trace.log";

}  // namespace simt
