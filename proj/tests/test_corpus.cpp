// tests/test_corpus.cpp

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

#include "doctest.h"

#include "simt/corpus.hpp"
#include "test_util.hpp"

using namespace simt;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("text corpus loads one instance per line") {
  TempDir dir;
  write_file(dir / "src.txt", "a b c\nd e\nf\n");
  write_file(dir / "ref.txt", "A B C\nD E\nF\n");
  const auto corpus = load_corpus(dir / "src.txt", dir / "ref.txt", DataKind::Text);
  REQUIRE(corpus.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(corpus[i].id == i);
  CHECK(corpus[0].source_words == std::vector<std::string>{"a", "b", "c"});
  CHECK(corpus[1].reference == std::vector<std::string>{"D", "E"});
  CHECK(corpus[2].source_size() == 1);
}

TEST_CASE("corpus errors") {
  TempDir dir;
  write_file(dir / "src.txt", "a\nb\nc\n");
  write_file(dir / "ref2.txt", "A\nB\n");
  write_file(dir / "ref_empty.txt", "A\n\nC\n");
  CHECK_THROWS_AS(load_corpus(dir / "src.txt", dir / "ref2.txt", DataKind::Text), Error);
  CHECK_THROWS_AS(load_corpus(dir / "src.txt", dir / "ref_empty.txt", DataKind::Text), Error);
  CHECK_THROWS_AS(load_corpus(dir / "src.txt", dir / "missing.txt", DataKind::Text), Error);
}

TEST_CASE("speech corpus reads WAV durations") {
  TempDir dir;
  AudioBuffer one_second;
  one_second.sample_rate = 16000;
  one_second.samples.assign(16000, 3);
  write_wav(dir / "a.wav", one_second);
  AudioBuffer short_clip;
  short_clip.sample_rate = 8000;
  short_clip.samples.assign(2000, -7);
  write_wav(dir / "b.wav", short_clip);

  write_file(dir / "src.txt", "a.wav\n" + (dir / "b.wav").string() + "\n");
  write_file(dir / "ref.txt", "x y\nz\n");
  const auto corpus = load_corpus(dir / "src.txt", dir / "ref.txt", DataKind::Speech);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].total_duration_ms == 1000);
  CHECK(corpus[0].audio.sample_rate == 16000);
  CHECK(corpus[0].audio.samples.size() == 16000);
  CHECK(corpus[1].total_duration_ms == 250);
  CHECK(corpus[1].audio.samples[0] == -7);
  CHECK(corpus[1].source_size() == 250);
}

TEST_CASE("WAV reader rejects what it cannot serve") {
  TempDir dir;
  write_file(dir / "junk.wav", "not a wav file at all");
  CHECK_THROWS_AS(read_wav(dir / "junk.wav"), Error);

  AudioBuffer audio;
  audio.sample_rate = 16000;
  audio.samples.assign(100, 1);
  write_wav(dir / "ok.wav", audio);
  auto bytes = testutil::read_file(dir / "ok.wav");
  // flip to stereo
  bytes[22] = 2;
  write_file(dir / "stereo.wav", bytes);
  CHECK_THROWS_AS(read_wav(dir / "stereo.wav"), Error);
  // truncate inside the data chunk
  write_file(dir / "cut.wav", testutil::read_file(dir / "ok.wav").substr(0, 60));
  CHECK_THROWS_AS(read_wav(dir / "cut.wav"), Error);

  const auto back = read_wav(dir / "ok.wav");
  CHECK(back.samples == audio.samples);
  CHECK(back.sample_rate == 16000);

  write_file(dir / "src.txt", "missing.wav\n");
  write_file(dir / "ref.txt", "x\n");
  CHECK_THROWS_AS(load_corpus(dir / "src.txt", dir / "ref.txt", DataKind::Speech), Error);
}
