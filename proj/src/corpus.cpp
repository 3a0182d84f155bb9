// src/corpus.cpp

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

#include "simt/corpus.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace simt {
namespace {

std::uint32_t read_u32(const char* p) {
  const auto* b = reinterpret_cast<const unsigned char*>(p);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t read_u16(const char* p) {
  const auto* b = reinterpret_cast<const unsigned char*>(p);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void put_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

void put_u16(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

[[noreturn]] void bad_wav(const std::filesystem::path& path,
                          const std::string& why) {
  throw Error(ErrorCode::Corpus, "invalid WAV " + path.string() + ": " + why);
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Corpus, "cannot open audio " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    bad_wav(path, "missing RIFF/WAVE header");
  }

  AudioBuffer audio;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = bytes.data() + pos;
    const std::uint32_t size = read_u32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) bad_wav(path, "truncated chunk");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) bad_wav(path, "short fmt chunk");
      const char* f = bytes.data() + body;
      const auto format = read_u16(f);
      const auto channels = read_u16(f + 2);
      const auto rate = read_u32(f + 4);
      const auto bits = read_u16(f + 14);
      if (format != 1) bad_wav(path, "not PCM");
      if (channels != 1) bad_wav(path, "not mono");
      if (bits != 16) bad_wav(path, "not 16-bit");
      if (rate == 0) bad_wav(path, "zero sample rate");
      audio.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) bad_wav(path, "data before fmt");
      audio.samples.resize(size / 2);
      for (std::size_t i = 0; i < audio.samples.size(); ++i) {
        audio.samples[i] =
            static_cast<std::int16_t>(read_u16(bytes.data() + body + 2 * i));
      }
      return audio;
    }
    pos = body + size + (size & 1);
  }
  bad_wav(path, "no data chunk");
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  out.write("RIFF", 4);
  put_u32(out, 36 + data_bytes);
  out.write("WAVEfmt ", 8);
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.write("data", 4);
  put_u32(out, data_bytes);
  for (auto s : audio.samples) put_u16(out, static_cast<std::uint16_t>(s));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Corpus, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<Instance> load_corpus(const std::filesystem::path& source_path,
                                  const std::filesystem::path& reference_path,
                                  DataKind kind) {
  const auto sources = read_lines(source_path);
  const auto references = read_lines(reference_path);
  if (sources.size() != references.size()) {
    throw Error(ErrorCode::Corpus,
                "source has " + std::to_string(sources.size()) +
                    " lines but reference has " +
                    std::to_string(references.size()));
  }

  std::vector<Instance> corpus;
  corpus.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    Instance inst;
    inst.id = i;
    inst.kind = kind;
    inst.reference = split_whitespace(references[i]);
    if (inst.reference.empty()) {
      throw Error(ErrorCode::Corpus,
                  "empty reference on line " + std::to_string(i + 1));
    }
    if (kind == DataKind::Text) {
      inst.source_words = split_whitespace(sources[i]);
      if (inst.source_words.empty()) {
        throw Error(ErrorCode::Corpus,
                    "empty source on line " + std::to_string(i + 1));
      }
    } else {
      const auto fields = split_whitespace(sources[i]);
      if (fields.size() != 1) {
        throw Error(ErrorCode::Corpus, "expected one audio path on line " +
                                           std::to_string(i + 1));
      }
      std::filesystem::path wav = fields[0];
      if (wav.is_relative()) wav = source_path.parent_path() / wav;
      inst.audio = read_wav(wav);
      inst.total_duration_ms = samples_to_ms(
          static_cast<std::int64_t>(inst.audio.samples.size()),
          inst.audio.sample_rate);
      if (inst.total_duration_ms <= 0) {
        throw Error(ErrorCode::Corpus, "empty audio " + wav.string());
      }
    }
    corpus.push_back(std::move(inst));
  }
  return corpus;
}

}  // namespace simt
