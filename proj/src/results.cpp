// src/results.cpp

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

#include "simt/results.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "simt/latency.hpp"

namespace simt {
namespace {

using nlohmann::json;

// Integral delays (token counts, whole ms) are written as JSON integers.
json number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9.0e15) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

json numbers(const std::vector<double>& vs) {
  json arr = json::array();
  for (double v : vs) arr.push_back(number(v));
  return arr;
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json EvaluationResult::to_json() const {
  json j;
  j["index"] = index;
  j["hypothesis"] = join_tokens(hypothesis);
  j["delays"] = numbers(delays);
  if (durations) j["durations"] = numbers(*durations);
  j["reference"] = join_tokens(reference);
  j["metrics"] = json::object();
  for (const auto& [name, value] : metrics) j["metrics"][name] = value;
  if (error) j["error"] = *error;
  return j;
}

EvaluationResult EvaluationResult::from_json(const json& j) {
  EvaluationResult r;
  r.index = j.at("index").get<std::size_t>();
  r.hypothesis = split_whitespace(j.at("hypothesis").get<std::string>());
  r.delays = j.at("delays").get<std::vector<double>>();
  if (j.contains("durations")) {
    r.durations = j["durations"].get<std::vector<double>>();
  }
  r.reference = split_whitespace(j.at("reference").get<std::string>());
  for (const auto& [name, value] : j.at("metrics").items()) {
    r.metrics[name] = value.get<double>();
  }
  if (j.contains("error")) r.error = j["error"].get<std::string>();
  if (r.hypothesis.size() != r.delays.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "row " + std::to_string(r.index) +
                    ": hypothesis and delays differ in length");
  }
  return r;
}

json CorpusReport::to_json() const {
  json j;
  j["num_instances"] = num_instances;
  j["BLEU"] = bleu;
  j["AP"] = optional_number(ap);
  j["AL"] = optional_number(al);
  j["DAL"] = optional_number(dal);
  j["num_latency_undefined"] = num_latency_undefined;
  j["num_errors"] = num_errors;
  j["custom"] = json::object();
  for (const auto& [name, value] : custom) j["custom"][name] = value;
  return j;
}

EvaluationResult finalize_instance(const Instance& instance,
                                   std::vector<std::string> tokens,
                                   std::vector<double> delays,
                                   std::vector<double> durations,
                                   const quality::MetricRegistry& registry,
                                   std::optional<std::string> error) {
  if (tokens.size() != delays.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "hypothesis and delays differ in length");
  }
  // EOS never reaches the scorer.
  if (!tokens.empty() && tokens.back() == kEos) {
    tokens.pop_back();
    delays.pop_back();
  }

  EvaluationResult r;
  r.index = instance.id;
  r.reference = instance.reference;
  r.error = std::move(error);

  const double source_size = instance.source_size();
  r.metrics["BLEU"] = quality::sentence_bleu(tokens, instance.reference);
  const auto lat = latency::evaluate(instance.kind, delays, source_size,
                                     instance.reference.size());
  if (lat.defined()) {
    r.metrics["AP"] = *lat.ap;
    r.metrics["AL"] = *lat.al;
    r.metrics["DAL"] = *lat.dal;
  }

  quality::MetricInput input;
  input.hypothesis = tokens;
  input.reference = instance.reference;
  input.delays = delays;
  input.durations = durations;
  input.kind = instance.kind;
  input.source_size = source_size;
  for (auto& [name, value] : registry.evaluate(input)) r.metrics[name] = value;

  r.hypothesis = std::move(tokens);
  r.delays = std::move(delays);
  if (instance.kind == DataKind::Speech) r.durations = std::move(durations);
  return r;
}

CorpusReport aggregate_corpus(std::vector<EvaluationResult> results) {
  if (results.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "no finished instances to aggregate");
  }
  std::sort(results.begin(), results.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });

  CorpusReport report;
  report.num_instances = results.size();

  std::vector<quality::TokenPair> pairs;
  pairs.reserve(results.size());
  std::map<std::string, std::pair<double, std::size_t>> sums;
  for (const auto& r : results) {
    pairs.emplace_back(r.hypothesis, r.reference);
    if (r.error) ++report.num_errors;
    if (!r.latency_defined()) {
      ++report.num_latency_undefined;
      log_warning("instance " + std::to_string(r.index) +
                  " has an empty hypothesis; latency excluded from means");
    }
    for (const auto& [name, value] : r.metrics) {
      auto& [total, count] = sums[name];
      total += value;
      ++count;
    }
  }
  report.bleu = quality::corpus_bleu(pairs);

  auto mean = [&](const std::string& name) -> std::optional<double> {
    auto it = sums.find(name);
    if (it == sums.end() || it->second.second == 0) return std::nullopt;
    return it->second.first / static_cast<double>(it->second.second);
  };
  report.ap = mean("AP");
  report.al = mean("AL");
  report.dal = mean("DAL");
  for (const auto& [name, acc] : sums) {
    if (name == "BLEU" || name == "AP" || name == "AL" || name == "DAL") {
      continue;
    }
    report.custom[name] = acc.first / static_cast<double>(acc.second);
  }
  return report;
}

void write_scores(const std::filesystem::path& path,
                  const CorpusReport& report) {
  std::ofstream out(path, std::ios::trunc);
  out << report.to_json().dump(2) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path, bool append)
    : path_(path),
      out_(path, append ? std::ios::app : std::ios::trunc) {
  if (!out_) throw Error(ErrorCode::Io, "cannot open " + path.string());
}

void JsonlWriter::append(const json& row) {
  std::lock_guard lock(mu_);
  out_ << row.dump() << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorCode::Io, "failed writing " + path_.string());
}

void JsonlWriter::append_all(const std::vector<json>& rows) {
  std::lock_guard lock(mu_);
  for (const auto& row : rows) out_ << row.dump() << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorCode::Io, "failed writing " + path_.string());
}

ResumeState resume(const std::filesystem::path& output_dir,
                   std::size_t num_instances) {
  ResumeState state;
  for (std::size_t i = 0; i < num_instances; ++i) state.pending.insert(i);

  const auto log_path = output_dir / kInstancesLog;
  if (!std::filesystem::exists(log_path)) return state;

  std::ifstream in(log_path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  in.close();

  std::size_t pos = 0;
  std::size_t good_end = 0;
  while (pos < content.size()) {
    const auto nl = content.find('\n', pos);
    const bool last = nl == std::string::npos;
    const std::string line =
        content.substr(pos, last ? std::string::npos : nl - pos);
    const std::size_t next = last ? content.size() : nl + 1;
    const bool trailing = content.find_first_not_of(" \t\r\n", next) ==
                          std::string::npos;

    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      pos = next;
      continue;
    }
    try {
      // a line without its newline was cut mid-write even if it parses
      if (last) throw std::runtime_error("unterminated line");
      auto row = EvaluationResult::from_json(json::parse(line));
      if (row.index >= num_instances) {
        throw Error(ErrorCode::Corpus,
                    "instances.log row index " + std::to_string(row.index) +
                        " outside corpus of " + std::to_string(num_instances));
      }
      if (state.pending.erase(row.index) > 0) {
        state.completed.push_back(std::move(row));
      }
      good_end = next;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Corpus || !trailing) throw;
      log_warning("dropping partial trailing row in " + log_path.string());
      break;
    } catch (const std::exception& e) {
      if (!trailing) {
        throw Error(ErrorCode::Corpus,
                    "corrupted row in " + log_path.string() + ": " + e.what());
      }
      log_warning("dropping partial trailing row in " + log_path.string());
      break;
    }
    pos = next;
  }
  if (good_end < content.size()) {
    std::filesystem::resize_file(log_path, good_end);
  }
  return state;
}

}  // namespace simt
