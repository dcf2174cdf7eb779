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

// phraseboost command-line tool. Every subcommand goes through the C API.
//
//   phraseboost build-tree --vocab units.txt --context phrases.txt --out t.gpb
//   phraseboost decode --mode ctc-greedy --vocab units.txt --table t.gpb
//       --emissions a.tbt b.tbt > hyps.jsonl
//   phraseboost evaluate --refs refs.jsonl --hyps hyps.jsonl --phrases p.txt
//   phraseboost bench --mode ctc-greedy --vocab units.txt --manifest m.txt
//
// Exit codes: 0 success, 2 bad input or usage, 1 internal error.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "phraseboost/phraseboost.h"

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

class CliError : public std::runtime_error {
 public:
  CliError(int exit_code, const std::string& what)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

void Check(pb_status status, const std::string& context) {
  if (status == PB_OK) return;
  const int code = status == PB_ERR_INTERNAL ? kExitInternal : kExitInput;
  throw CliError(code, context + ": " + pb_last_error());
}

[[noreturn]] void UsageError(const std::string& what) {
  throw CliError(kExitInput, what);
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using VocabPtr = std::unique_ptr<pb_vocab, Deleter<pb_vocab, pb_vocab_free>>;
using ListPtr = std::unique_ptr<pb_context_list,
                                Deleter<pb_context_list, pb_context_list_free>>;
using TablePtr = std::unique_ptr<pb_table, Deleter<pb_table, pb_table_free>>;
using EmissionsPtr =
    std::unique_ptr<pb_emissions, Deleter<pb_emissions, pb_emissions_free>>;
using StepModelPtr =
    std::unique_ptr<pb_step_model, Deleter<pb_step_model, pb_step_model_free>>;
using ResultPtr =
    std::unique_ptr<pb_result, Deleter<pb_result, pb_result_free>>;

struct CString {
  char* p = nullptr;
  ~CString() { pb_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

VocabPtr LoadVocab(const std::string& path, const std::string* blank,
                   const std::string* eos) {
  pb_vocab* v = nullptr;
  Check(pb_vocab_load(path.c_str(), blank ? blank->c_str() : nullptr,
                      eos ? eos->c_str() : nullptr, &v),
        "loading vocabulary " + path);
  return VocabPtr(v);
}

struct TreeFlags {
  std::string vocab;
  std::string context;
  std::string tokenize = "char";
  int min_chars = 3;
  float c0 = 1.0f;
  float beta = 2.0f;
  std::string weights = "depth";
  float final_bonus = 0.0f;
  float unk_score = 0.0f;

  void Register(CLI::App* app) {
    app->add_option("--vocab", vocab, "Vocabulary file, one token per line")
        ->required();
    app->add_option("--context", context,
                    "Context list, one phrase per line ('#' comments)")
        ->required();
    app->add_option("--tokenize", tokenize,
                    "Phrase tokenization: char (UTF-8 code points) or ids")
        ->check(CLI::IsMember({"char", "ids"}))
        ->capture_default_str();
    app->add_option("--min-chars", min_chars,
                    "Drop phrases shorter than this many characters")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--c0", c0, "Score of the first arc of every phrase")
        ->capture_default_str();
    app->add_option("--beta", beta, "Depth scaling for arcs below depth 1")
        ->capture_default_str();
    app->add_option("--weights", weights,
                    "Arc weighting: depth (depth-scaled) or uniform")
        ->check(CLI::IsMember({"depth", "uniform"}))
        ->capture_default_str();
    app->add_option("--final-bonus", final_bonus,
                    "Extra score on the final arc (uniform weighting)")
        ->capture_default_str();
    app->add_option("--unk-score", unk_score,
                    "Score for tokens that start no phrase")
        ->capture_default_str();
  }

  pb_tree_params Params() const {
    pb_tree_params p = pb_tree_params_default();
    p.c0 = c0;
    p.beta = beta;
    p.weight_mode =
        weights == "uniform" ? PB_WEIGHT_UNIFORM : PB_WEIGHT_DEPTH_SCALED;
    p.uniform_final_bonus = final_bonus;
    p.unk_score = unk_score;
    return p;
  }

  ListPtr LoadList(const pb_vocab* v) const {
    pb_context_list* list = nullptr;
    Check(pb_context_list_load(
              context.c_str(), v,
              tokenize == "ids" ? PB_TOKENIZE_IDS : PB_TOKENIZE_CHAR,
              min_chars, &list),
          "loading context list " + context);
    return ListPtr(list);
  }
};

void WarnAboutList(const pb_context_list* list) {
  const int dups = pb_context_list_num_duplicates(list);
  const int short_ = pb_context_list_num_too_short(list);
  if (dups > 0) {
    std::cerr << "warning: " << dups << " duplicate phrase(s) ignored\n";
  }
  if (short_ > 0) {
    std::cerr << "warning: " << short_
              << " phrase(s) shorter than --min-chars dropped\n";
  }
  if (pb_context_list_size(list) == 0) {
    std::cerr << "warning: context list is empty; the table only holds the "
                 "root state\n";
  }
}

int RunBuildTree(const TreeFlags& flags, const std::string& out) {
  VocabPtr vocab = LoadVocab(flags.vocab, nullptr, nullptr);
  ListPtr list = flags.LoadList(vocab.get());
  WarnAboutList(list.get());
  const pb_tree_params params = flags.Params();
  pb_table* raw = nullptr;
  Check(pb_table_build(list.get(), vocab.get(), &params, &raw),
        "building table");
  TablePtr table(raw);
  Check(pb_table_save(table.get(), out.c_str()), "writing " + out);
  pb_table_summary s;
  Check(pb_table_get_summary(table.get(), &s), "summary");
  std::cout << "phrases " << pb_context_list_size(list.get()) << "\n"
            << "states " << s.num_states << "\n"
            << "arcs " << s.num_arcs << "\n"
            << "finals " << s.num_finals << "\n"
            << "max_depth " << s.max_depth << "\n"
            << "vocab_size " << s.vocab_size << "\n";
  return 0;
}

int RunDumpTree(const TreeFlags& flags) {
  VocabPtr vocab = LoadVocab(flags.vocab, nullptr, nullptr);
  ListPtr list = flags.LoadList(vocab.get());
  WarnAboutList(list.get());
  const pb_tree_params params = flags.Params();
  CString dump;
  Check(pb_tree_dump(list.get(), vocab.get(), &params, &dump.p), "dump");
  std::cout << dump.str();
  return 0;
}

// Decoding ---------------------------------------------------------------

struct DecodeFlags {
  std::string mode = "ctc-greedy";
  std::string vocab;
  std::string table;
  std::vector<std::string> emissions;
  std::vector<std::string> step_models;
  std::string manifest;
  std::string blank = "<blank>";
  std::string eos = "<eos>";
  float lambda = 1.0f;
  int beam = 0;  // 0: per-mode default
  int max_symbols = 5;
  int max_len = 0;
  int num_frames = 0;
  bool no_eos_bump = false;
  bool trace = false;
  bool lenient = false;
  float frame_duration = 0.04f;
  int workers = 0;
  std::string out;
  CLI::Option* blank_opt = nullptr;

  void Register(CLI::App* app) {
    app->add_option("--mode", mode,
                    "Decoder: ctc-greedy, ctc-beam, rnnt-greedy, rnnt-beam, "
                    "aed-beam")
        ->check(CLI::IsMember(
            {"ctc-greedy", "ctc-beam", "rnnt-greedy", "rnnt-beam", "aed-beam"}))
        ->capture_default_str();
    app->add_option("--vocab", vocab, "Vocabulary file")->required();
    app->add_option("--table", table,
                    "Boosting table from build-tree; omit for baseline "
                    "decoding");
    app->add_option("--emissions", emissions,
                    "TBT1 log-probability files (one per utterance)");
    app->add_option("--step-model", step_models,
                    "Step-model JSON files (rnnt-* and aed-beam modes)");
    app->add_option("--manifest", manifest,
                    "File listing inputs, one per line: [id<TAB>]path; "
                    ".json paths are step models, others TBT1");
    blank_opt = app->add_option("--blank", blank, "Blank symbol in --vocab")
                    ->capture_default_str();
    app->add_option("--eos", eos, "End-of-sentence symbol in --vocab (aed)")
        ->capture_default_str();
    app->add_option("--lambda", lambda, "Boosting weight")
        ->capture_default_str();
    app->add_option("--beam", beam,
                    "Beam size (default 8 for ctc/rnnt, 3 for aed)");
    app->add_option("--max-symbols", max_symbols,
                    "Transducer symbol cap per frame")
        ->capture_default_str();
    app->add_option("--max-len", max_len,
                    "Maximum output length (required for aed-beam)");
    app->add_option("--num-frames", num_frames,
                    "Transducer frame count for step models without "
                    "\"frames\"");
    app->add_flag("--no-eos-bump", no_eos_bump,
                  "Disable the end-of-sentence score increase (aed-beam)");
    app->add_flag("--trace", trace, "Add the per-token boosting trace");
    app->add_flag("--lenient", lenient,
                  "Accept emission rows that are not normalized");
    app->add_option("--frame-duration", frame_duration,
                    "Seconds per emission frame")
        ->capture_default_str();
    app->add_option("--workers", workers,
                    "Parallel utterances (default: available cores)");
    app->add_option("--out", out, "Output JSON-lines file (default stdout)");
  }

  pb_decode_mode Mode() const {
    if (mode == "ctc-greedy") return PB_DECODE_CTC_GREEDY;
    if (mode == "ctc-beam") return PB_DECODE_CTC_BEAM;
    if (mode == "rnnt-greedy") return PB_DECODE_RNNT_GREEDY;
    if (mode == "rnnt-beam") return PB_DECODE_RNNT_BEAM;
    return PB_DECODE_AED_BEAM;
  }

  pb_decode_config Config() const {
    pb_decode_config c = pb_decode_config_default(Mode());
    c.lambda = lambda;
    if (beam > 0) c.beam_size = beam;
    c.max_symbols_per_frame = max_symbols;
    c.eos_bump_enabled = no_eos_bump ? 0 : 1;
    c.keep_trace = trace ? 1 : 0;
    c.max_len = max_len;
    c.num_frames = num_frames;
    return c;
  }
};

struct Input {
  std::string id;
  std::string path;
  bool step_model = false;
};

std::string StemOf(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

bool IsJson(const std::string& path) {
  return std::filesystem::path(path).extension() == ".json";
}

std::vector<Input> CollectInputs(const DecodeFlags& f) {
  std::vector<Input> inputs;
  for (const std::string& p : f.emissions) inputs.push_back({StemOf(p), p, false});
  for (const std::string& p : f.step_models) inputs.push_back({StemOf(p), p, true});
  if (!f.manifest.empty()) {
    std::ifstream in(f.manifest);
    if (!in) UsageError("cannot open manifest " + f.manifest);
    const std::filesystem::path base =
        std::filesystem::path(f.manifest).parent_path();
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      Input input;
      const size_t tab = line.find('\t');
      input.path = tab == std::string::npos ? line : line.substr(tab + 1);
      if (std::filesystem::path(input.path).is_relative()) {
        input.path = (base / input.path).string();
      }
      input.id = tab == std::string::npos ? StemOf(input.path)
                                          : line.substr(0, tab);
      input.step_model = IsJson(input.path);
      inputs.push_back(std::move(input));
    }
  }
  if (inputs.empty()) {
    UsageError("no inputs: give --emissions, --step-model or --manifest");
  }
  return inputs;
}

// Everything a decoding run needs, loaded once.
struct Corpus {
  VocabPtr vocab;
  TablePtr table;
  std::vector<Input> inputs;
  std::vector<EmissionsPtr> emissions;   // per input, null for step models
  std::vector<StepModelPtr> step_models; // per input, null for emissions
  double audio_seconds = 0.0;
};

Corpus LoadCorpus(const DecodeFlags& f) {
  const pb_decode_mode mode = f.Mode();
  if (mode == PB_DECODE_AED_BEAM && f.max_len <= 0) {
    UsageError("aed-beam needs --max-len");
  }
  Corpus c;
  c.inputs = CollectInputs(f);
  const bool ctc = mode == PB_DECODE_CTC_GREEDY || mode == PB_DECODE_CTC_BEAM;
  const bool aed = mode == PB_DECODE_AED_BEAM;
  bool any_emissions = false;
  for (const Input& in : c.inputs) {
    if (in.step_model && ctc) {
      UsageError("ctc modes decode TBT1 emissions, not step models: " +
                 in.path);
    }
    any_emissions = any_emissions || !in.step_model;
  }
  // Step models carry their own blank / eos ids; the vocabulary then only
  // renders text.
  const bool need_blank = any_emissions && (!aed || f.blank_opt->count() > 0);
  c.vocab = LoadVocab(f.vocab, need_blank ? &f.blank : nullptr,
                      any_emissions && aed ? &f.eos : nullptr);
  if (!f.table.empty()) {
    pb_table* t = nullptr;
    Check(pb_table_load(f.table.c_str(), &t), "loading table " + f.table);
    c.table.reset(t);
  }
  for (const Input& in : c.inputs) {
    if (in.step_model) {
      pb_step_model* m = nullptr;
      Check(pb_step_model_load(in.path.c_str(), &m), "loading " + in.path);
      c.step_models.emplace_back(m);
      c.emissions.emplace_back();
      c.audio_seconds += pb_step_model_num_frames(m) * f.frame_duration;
    } else {
      pb_emissions* e = nullptr;
      Check(pb_emissions_load(in.path.c_str(), f.lenient ? 0 : 1, &e),
            "loading " + in.path);
      c.emissions.emplace_back(e);
      c.step_models.emplace_back();
      pb_emissions_set_frame_duration(e, f.frame_duration);
      if (pb_vocab_blank_id(c.vocab.get()) >= 0 &&
          pb_emissions_vocab_size(e) == pb_vocab_size(c.vocab.get())) {
        Check(pb_emissions_set_blank_id(e, pb_vocab_blank_id(c.vocab.get())),
              in.path);
      }
      c.audio_seconds += pb_emissions_duration(e);
    }
  }
  return c;
}

int DefaultWorkers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Decodes every utterance; returns the JSON-lines output in input order.
std::string DecodeCorpus(const Corpus& c, const DecodeFlags& f) {
  const pb_decode_mode mode = f.Mode();
  const pb_decode_config config = f.Config();
  const size_t n = c.inputs.size();
  std::vector<std::string> lines(n);
  std::vector<std::string> errors(n);
  std::vector<pb_status> statuses(n, PB_OK);
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < n; i = next++) {
      pb_result* r = nullptr;
      pb_status st;
      if (c.step_models[i]) {
        st = pb_decode_step_model(mode, c.step_models[i].get(), c.table.get(),
                                  c.vocab.get(), &config, &r);
      } else {
        st = pb_decode_emissions(mode, c.emissions[i].get(), c.table.get(),
                                 c.vocab.get(), &config, &r);
      }
      ResultPtr result(r);
      CString json;
      if (st == PB_OK) {
        st = pb_result_to_json(result.get(), c.inputs[i].id.c_str(),
                               f.trace ? 1 : 0, &json.p);
      }
      statuses[i] = st;
      if (st != PB_OK) {
        errors[i] = pb_last_error();
      } else {
        lines[i] = json.str();
      }
    }
  };
  const int workers = std::max(
      1, std::min<int>(f.workers > 0 ? f.workers : DefaultWorkers(),
                       static_cast<int>(n)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  std::string out;
  for (size_t i = 0; i < n; ++i) {
    if (statuses[i] != PB_OK) {
      throw CliError(statuses[i] == PB_ERR_INTERNAL ? kExitInternal
                                                    : kExitInput,
                     "decoding " + c.inputs[i].path + ": " + errors[i]);
    }
    out += lines[i];
    out += '\n';
  }
  return out;
}

void WriteOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) UsageError("cannot write " + path);
  out << text;
  if (!out) UsageError("cannot write " + path);
}

int RunDecode(const DecodeFlags& f) {
  const Corpus c = LoadCorpus(f);
  WriteOutput(f.out, DecodeCorpus(c, f));
  return 0;
}

// Bench ------------------------------------------------------------------

struct BenchContext {
  const DecodeFlags* flags;
  const Corpus* corpus;  // preloaded unless include_load
  bool include_load;
};

pb_status BenchRun(void* user_data, char** output) {
  auto* ctx = static_cast<BenchContext*>(user_data);
  try {
    std::string text;
    if (ctx->include_load) {
      const Corpus c = LoadCorpus(*ctx->flags);
      text = DecodeCorpus(c, *ctx->flags);
    } else {
      text = DecodeCorpus(*ctx->corpus, *ctx->flags);
    }
    *output = pb_string_dup(text.c_str());
    return PB_OK;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code() == kExitInternal ? PB_ERR_INTERNAL
                                          : PB_ERR_INVALID_ARGUMENT;
  }
}

int RunBench(const DecodeFlags& f, int runs, int warmup, bool include_load) {
  const Corpus c = LoadCorpus(f);
  BenchContext ctx{&f, &c, include_load};
  std::vector<double> seconds(std::max(runs, 0));
  pb_bench_report report{};
  const pb_status st = pb_bench(&BenchRun, &ctx, runs, warmup,
                                c.audio_seconds, seconds.data(), &report);
  nlohmann::ordered_json j;
  j["mode"] = f.mode;
  j["boosted"] = !f.table.empty();
  j["utterances"] = c.inputs.size();
  j["warmup"] = report.warmup;
  j["runs"] = report.runs_completed;
  j["run_seconds"] = std::vector<double>(
      seconds.begin(), seconds.begin() + report.runs_completed);
  j["mean_seconds"] = report.mean_seconds;
  j["audio_seconds"] = report.audio_seconds;
  j["rtfx"] = report.rtfx;
  j["deterministic"] = report.deterministic != 0;
  std::cout << j.dump() << "\n";
  std::fprintf(stderr, "%s: %d warmup + %d runs, mean %.4f s, RTFx %.1f\n",
               f.mode.c_str(), report.warmup, report.runs_completed,
               report.mean_seconds, report.rtfx);
  if (st != PB_OK) {
    // Runs so far are reported above.
    Check(st, "bench");
  }
  return 0;
}

// Evaluate ---------------------------------------------------------------

int RunEvaluate(const std::string& refs, const std::string& hyps,
                const std::string& phrases, int min_chars,
                bool case_sensitive) {
  CString json, table;
  Check(pb_evaluate(refs.c_str(), hyps.c_str(),
                    phrases.empty() ? nullptr : phrases.c_str(), min_chars,
                    case_sensitive ? 1 : 0, &json.p, &table.p),
        "evaluate");
  std::cout << json.str() << "\n";
  std::cerr << table.str();
  return 0;
}

// Synth ------------------------------------------------------------------

struct SynthFlags {
  std::string vocab;
  std::string blank = "<blank>";
  std::string text;
  std::string context;
  std::string out;
  float margin = 0.5f;
  uint64_t seed = 0;
  int frames_per_token = 1;
  int blank_frames = 1;
  float clean_gap = 40.0f;
};

// Marks the target positions covered by an occurrence of a context phrase.
std::vector<uint8_t> PhrasePositions(const std::vector<int32_t>& target,
                                     const std::vector<std::vector<int32_t>>&
                                         phrases) {
  std::vector<uint8_t> mark(target.size(), 0);
  for (const auto& p : phrases) {
    if (p.empty() || p.size() > target.size()) continue;
    for (size_t i = 0; i + p.size() <= target.size(); ++i) {
      if (std::equal(p.begin(), p.end(), target.begin() + i)) {
        std::fill(mark.begin() + i, mark.begin() + i + p.size(), 1);
      }
    }
  }
  return mark;
}

std::vector<int32_t> TokenizeText(const pb_vocab* v, const std::string& text) {
  int32_t* ids = nullptr;
  size_t n = 0;
  Check(pb_vocab_tokenize(v, text.c_str(), 0, &ids, &n),
        "tokenizing '" + text + "'");
  std::vector<int32_t> out(ids, ids + n);
  pb_ids_free(ids);
  return out;
}

int RunSynth(const SynthFlags& f) {
  VocabPtr vocab = LoadVocab(f.vocab, &f.blank, nullptr);
  const std::vector<int32_t> target = TokenizeText(vocab.get(), f.text);
  std::vector<uint8_t> designated;
  std::vector<int32_t> avoid;
  if (!f.context.empty()) {
    std::ifstream in(f.context);
    if (!in) UsageError("cannot open " + f.context);
    std::vector<std::vector<int32_t>> phrases;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') {
        continue;
      }
      phrases.push_back(TokenizeText(vocab.get(), line));
      avoid.insert(avoid.end(), phrases.back().begin(), phrases.back().end());
    }
    designated = PhrasePositions(target, phrases);
  }
  pb_synth_options o = pb_synth_options_default();
  o.margin = f.margin;
  o.seed = f.seed;
  o.frames_per_token = f.frames_per_token;
  o.blank_frames = f.blank_frames;
  o.clean_gap = f.clean_gap;
  pb_emissions* raw = nullptr;
  Check(pb_emissions_synth_ctc(
            target.data(), target.size(), pb_vocab_size(vocab.get()),
            pb_vocab_blank_id(vocab.get()), &o,
            f.context.empty() ? nullptr : designated.data(), avoid.data(),
            avoid.size(), &raw),
        "synthesizing emissions");
  EmissionsPtr em(raw);
  Check(pb_emissions_save(em.get(), f.out.c_str()), "writing " + f.out);
  std::cerr << "wrote " << pb_emissions_num_frames(em.get()) << " x "
            << pb_emissions_vocab_size(em.get()) << " emissions to " << f.out
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phrase boosting for CTC, transducer and AED decoding"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pb_version());

  TreeFlags build_flags;
  std::string build_out;
  CLI::App* build = app.add_subcommand(
      "build-tree", "Compile a context list into a boosting table (GPB1)");
  build_flags.Register(build);
  build->add_option("--out", build_out, "Output table file")->required();

  TreeFlags dump_flags;
  CLI::App* dump =
      app.add_subcommand("dump-tree", "Print the prefix tree of a context list");
  dump_flags.Register(dump);

  DecodeFlags decode_flags;
  CLI::App* decode =
      app.add_subcommand("decode", "Decode utterances to JSON lines");
  decode_flags.Register(decode);

  DecodeFlags bench_flags;
  int bench_runs = 3;
  int bench_warmup = 1;
  bool bench_include_load = false;
  CLI::App* bench = app.add_subcommand(
      "bench", "Time decoding: warm-up runs, then timed runs; reports RTFx");
  bench_flags.Register(bench);
  bench->add_option("--runs", bench_runs, "Timed runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--warmup", bench_warmup, "Untimed warm-up runs")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bench->add_flag("--include-load", bench_include_load,
                  "Reload inputs from disk in every run");

  std::string refs, hyps, phrases;
  int eval_min_chars = 3;
  bool case_sensitive = false;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "WER and keyphrase F-score of hypotheses vs references");
  evaluate->add_option("--refs", refs, "References, JSON lines {id, text}")
      ->required();
  evaluate->add_option("--hyps", hyps, "Hypotheses, JSON lines {id, text}")
      ->required();
  evaluate->add_option("--phrases", phrases, "Context list to score");
  evaluate->add_option("--min-chars", eval_min_chars,
                       "Ignore phrases shorter than this")
      ->capture_default_str();
  evaluate->add_flag("--case-sensitive", case_sensitive,
                     "Match phrases case-sensitively");

  SynthFlags synth_flags;
  CLI::App* synth = app.add_subcommand(
      "synth", "Write synthetic CTC emissions for a transcript");
  synth->add_option("--vocab", synth_flags.vocab, "Vocabulary file")
      ->required();
  synth->add_option("--blank", synth_flags.blank, "Blank symbol")
      ->capture_default_str();
  synth->add_option("--text", synth_flags.text, "Transcript")->required();
  synth->add_option("--context", synth_flags.context,
                    "Only tokens inside these phrases trail a distractor");
  synth->add_option("--out", synth_flags.out, "Output TBT1 file")->required();
  synth->add_option("--margin", synth_flags.margin,
                    "Distractor lead on designated frames (nats)")
      ->capture_default_str();
  synth->add_option("--seed", synth_flags.seed, "Random seed")
      ->capture_default_str();
  synth->add_option("--frames-per-token", synth_flags.frames_per_token,
                    "Frames per target token")
      ->capture_default_str();
  synth->add_option("--blank-frames", synth_flags.blank_frames,
                    "Blank frames after each token")
      ->capture_default_str();
  synth->add_option("--clean-gap", synth_flags.clean_gap,
                    "Lead of the intended symbol on clean frames")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*build) return RunBuildTree(build_flags, build_out);
    if (*dump) return RunDumpTree(dump_flags);
    if (*decode) return RunDecode(decode_flags);
    if (*bench) {
      return RunBench(bench_flags, bench_runs, bench_warmup,
                      bench_include_load);
    }
    if (*evaluate) {
      return RunEvaluate(refs, hyps, phrases, eval_min_chars, case_sensitive);
    }
    if (*synth) return RunSynth(synth_flags);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
