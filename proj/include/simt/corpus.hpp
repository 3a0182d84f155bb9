// include/simt/corpus.hpp

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

#include <filesystem>
#include <vector>

#include "simt/core.hpp"

namespace simt {

/// Reads a RIFF/WAVE file holding 16-bit PCM mono audio.
AudioBuffer read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);

/// Loads aligned source and reference files. Text sources are whitespace
/// split into words; speech source lines are WAV paths (relative paths are
/// resolved against the source file's directory).
std::vector<Instance> load_corpus(const std::filesystem::path& source_path,
                                  const std::filesystem::path& reference_path,
                                  DataKind kind);

std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace simt
