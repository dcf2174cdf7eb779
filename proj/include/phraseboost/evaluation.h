// Copyright (c) 2026 The phraseboost Authors
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

#ifndef PHRASEBOOST_EVALUATION_H_
#define PHRASEBOOST_EVALUATION_H_

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phraseboost {

using Words = std::vector<std::string>;

Words SplitWords(std::string_view text);

struct EditCounts {
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int reference_length = 0;

  int errors() const { return substitutions + insertions + deletions; }
};

// Unit-cost Levenshtein alignment of hyp against ref.
EditCounts AlignWords(std::span<const std::string> ref,
                      std::span<const std::string> hyp);

// Word error rate in percent. ref must be non-empty.
double Wer(std::span<const std::string> ref, std::span<const std::string> hyp);

// Corpus-level WER: total errors over total reference words.
double CorpusWer(std::span<const Words> refs, std::span<const Words> hyps);

struct PhraseCounts {
  std::string phrase;
  int ref_count = 0;
  int hyp_count = 0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

struct KeyphraseScore {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double precision = 0.0;  // percent
  double recall = 0.0;
  double fscore = 0.0;
  std::vector<PhraseCounts> per_phrase;
};

// Every start position whose following words equal the
// phrase counts as one occurrence (word-boundary aligned, so "cat" never
// matches inside "cats").
int CountOccurrences(std::span<const std::string> words,
                     std::span<const std::string> phrase);

// Per utterance and phrase, TP = min(ref, hyp), FP = excess in hyp, FN =
// excess in ref; summed over the corpus.
KeyphraseScore KeyphrasePrf(std::span<const Words> refs,
                            std::span<const Words> hyps,
                            std::span<const std::string> phrases,
                            bool case_insensitive = true);

double FScore(double precision, double recall);

// total audio duration / wall time.
double Rtfx(double audio_seconds, double wall_seconds);

struct BenchReport {
  int warmup = 0;
  std::vector<double> run_seconds;  // timed runs only
  double mean_seconds = 0.0;
  double audio_seconds = 0.0;
  double rtfx = 0.0;
  bool deterministic = true;
  std::string error;  // set when a run failed; runs so far are kept

  bool ok() const { return error.empty() && deterministic; }
};

// Runs warmup untimed invocations, then runs timed ones, and compares every
// output against the first.
BenchReport Bench(const std::function<std::string()>& run,
                  double audio_seconds, int runs = 3, int warmup = 1);

}  // namespace phraseboost

#endif  // PHRASEBOOST_EVALUATION_H_
