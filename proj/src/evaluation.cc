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

#include "phraseboost/evaluation.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <sstream>

#include "phraseboost/error.h"

namespace phraseboost {
namespace {

std::string Lower(std::string s) {
  for (char& c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

Words Normalize(std::span<const std::string> words, bool case_insensitive) {
  Words out(words.begin(), words.end());
  if (case_insensitive) {
    for (auto& w : out) w = Lower(std::move(w));
  }
  return out;
}

}  // namespace

Words SplitWords(std::string_view text) {
  std::istringstream in{std::string(text)};
  Words words;
  std::string w;
  while (in >> w) words.push_back(std::move(w));
  return words;
}

EditCounts AlignWords(std::span<const std::string> ref,
                      std::span<const std::string> hyp) {
  struct Cell {
    int cost, sub, ins, del;
  };
  const size_t n = ref.size();
  const size_t m = hyp.size();
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = {static_cast<int>(j), 0, static_cast<int>(j), 0};
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = {static_cast<int>(i), 0, 0, static_cast<int>(i)};
    for (size_t j = 1; j <= m; ++j) {
      Cell diag = prev[j - 1];
      if (ref[i - 1] != hyp[j - 1]) {
        ++diag.cost;
        ++diag.sub;
      }
      Cell del = prev[j];
      ++del.cost;
      ++del.del;
      Cell ins = cur[j - 1];
      ++ins.cost;
      ++ins.ins;
      // Prefer substitutions, then deletions, on equal cost.
      Cell best = diag;
      if (del.cost < best.cost) best = del;
      if (ins.cost < best.cost) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  EditCounts counts;
  counts.substitutions = prev[m].sub;
  counts.insertions = prev[m].ins;
  counts.deletions = prev[m].del;
  counts.reference_length = static_cast<int>(n);
  return counts;
}

double Wer(std::span<const std::string> ref, std::span<const std::string> hyp) {
  Require(!ref.empty(), "WER needs a non-empty reference");
  const EditCounts c = AlignWords(ref, hyp);
  return 100.0 * c.errors() / c.reference_length;
}

double CorpusWer(std::span<const Words> refs, std::span<const Words> hyps) {
  Require(refs.size() == hyps.size(), "reference / hypothesis count mismatch");
  long errors = 0;
  long length = 0;
  for (size_t i = 0; i < refs.size(); ++i) {
    const EditCounts c = AlignWords(refs[i], hyps[i]);
    errors += c.errors();
    length += c.reference_length;
  }
  Require(length > 0, "WER needs a non-empty reference");
  return 100.0 * static_cast<double>(errors) / static_cast<double>(length);
}

int CountOccurrences(std::span<const std::string> words,
                     std::span<const std::string> phrase) {
  if (phrase.empty() || phrase.size() > words.size()) return 0;
  int count = 0;
  for (size_t i = 0; i + phrase.size() <= words.size(); ++i) {
    if (std::equal(phrase.begin(), phrase.end(), words.begin() + i)) ++count;
  }
  return count;
}

double FScore(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

KeyphraseScore KeyphrasePrf(std::span<const Words> refs,
                            std::span<const Words> hyps,
                            std::span<const std::string> phrases,
                            bool case_insensitive) {
  Require(refs.size() == hyps.size(),
          "reference / hypothesis count mismatch: " +
              std::to_string(refs.size()) + " vs " +
              std::to_string(hyps.size()));
  KeyphraseScore score;
  std::vector<Words> phrase_words;
  for (const std::string& p : phrases) {
    phrase_words.push_back(Normalize(SplitWords(p), case_insensitive));
    score.per_phrase.push_back({p});
  }
  for (size_t u = 0; u < refs.size(); ++u) {
    const Words ref = Normalize(refs[u], case_insensitive);
    const Words hyp = Normalize(hyps[u], case_insensitive);
    for (size_t p = 0; p < phrase_words.size(); ++p) {
      const int cr = CountOccurrences(ref, phrase_words[p]);
      const int ch = CountOccurrences(hyp, phrase_words[p]);
      PhraseCounts& pc = score.per_phrase[p];
      pc.ref_count += cr;
      pc.hyp_count += ch;
      pc.tp += std::min(cr, ch);
      pc.fp += std::max(ch - cr, 0);
      pc.fn += std::max(cr - ch, 0);
    }
  }
  for (const PhraseCounts& pc : score.per_phrase) {
    score.tp += pc.tp;
    score.fp += pc.fp;
    score.fn += pc.fn;
  }
  if (score.tp + score.fp > 0) {
    score.precision = 100.0 * score.tp / (score.tp + score.fp);
  }
  if (score.tp + score.fn > 0) {
    score.recall = 100.0 * score.tp / (score.tp + score.fn);
  }
  score.fscore = FScore(score.precision, score.recall);
  return score;
}

double Rtfx(double audio_seconds, double wall_seconds) {
  Require(wall_seconds > 0.0, "wall time must be positive");
  Require(audio_seconds >= 0.0, "audio duration must be non-negative");
  return audio_seconds / wall_seconds;
}

BenchReport Bench(const std::function<std::string()>& run,
                  double audio_seconds, int runs, int warmup) {
  Require(runs >= 1, "bench needs at least one timed run");
  Require(warmup >= 0, "warmup count must be non-negative");
  BenchReport report;
  report.warmup = warmup;
  report.audio_seconds = audio_seconds;
  std::string reference;
  bool have_reference = false;
  auto check = [&](const std::string& output) {
    if (!have_reference) {
      reference = output;
      have_reference = true;
    } else if (output != reference) {
      report.deterministic = false;
    }
  };
  try {
    for (int i = 0; i < warmup; ++i) check(run());
    for (int i = 0; i < runs; ++i) {
      const auto start = std::chrono::steady_clock::now();
      std::string output = run();
      const auto stop = std::chrono::steady_clock::now();
      report.run_seconds.push_back(
          std::chrono::duration<double>(stop - start).count());
      check(output);
    }
  } catch (const std::exception& e) {
    report.error = e.what();
  }
  if (!report.run_seconds.empty()) {
    double total = 0.0;
    for (double s : report.run_seconds) total += s;
    report.mean_seconds = total / report.run_seconds.size();
    if (report.mean_seconds > 0.0) {
      report.rtfx = Rtfx(audio_seconds, report.mean_seconds);
    }
  }
  if (!report.deterministic && report.error.empty()) {
    report.error = "decoder output differs between runs";
  }
  return report;
}

}  // namespace phraseboost
