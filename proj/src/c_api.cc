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

#include "phraseboost/phraseboost.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <map>
#include <memory>
#include <new>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "file_util.h"
#include "phraseboost/arc_table.h"
#include "phraseboost/context_list.h"
#include "phraseboost/decoder.h"
#include "phraseboost/emissions.h"
#include "phraseboost/error.h"
#include "phraseboost/evaluation.h"
#include "phraseboost/prefix_tree.h"
#include "phraseboost/step_model.h"
#include "phraseboost/vocabulary.h"

namespace pb = phraseboost;
using ordered_json = nlohmann::ordered_json;

struct pb_vocab {
  pb::Vocabulary vocab;
};

struct pb_context_list {
  pb::ContextList list;
};

struct pb_table {
  pb::ArcTable table;
};

struct pb_emissions {
  pb::EmissionMatrix em;
};

struct pb_step_model {
  pb::TableStepModel model;
};

struct pb_result {
  pb::NBest nbest;
  std::vector<std::string> texts;
  // Trace of the best hypothesis rendered with the vocabulary.
  std::vector<std::string> trace_tokens;
  std::vector<std::string> trace_states;
};

namespace {

thread_local std::string g_last_error;

pb_status ToStatus(pb::ErrorCode code) {
  switch (code) {
    case pb::ErrorCode::kInvalidArgument:
      return PB_ERR_INVALID_ARGUMENT;
    case pb::ErrorCode::kIo:
      return PB_ERR_IO;
    case pb::ErrorCode::kFormat:
      return PB_ERR_FORMAT;
    case pb::ErrorCode::kInternal:
      return PB_ERR_INTERNAL;
  }
  return PB_ERR_INTERNAL;
}

template <typename F>
pb_status Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return PB_OK;
  } catch (const pb::Error& e) {
    g_last_error = e.what();
    return ToStatus(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("malformed JSON: ") + e.what();
    return PB_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PB_ERR_INTERNAL;
  }
}

void NotNull(const void* p, const char* what) {
  pb::Require(p != nullptr, std::string(what) + " must not be null");
}

char* DupString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

pb::TreeParams ToTreeParams(const pb_tree_params& p) {
  pb::TreeParams params;
  params.c0 = p.c0;
  params.beta = p.beta;
  switch (p.weight_mode) {
    case PB_WEIGHT_DEPTH_SCALED:
      params.weight_mode = pb::WeightMode::kDepthScaled;
      break;
    case PB_WEIGHT_UNIFORM:
      params.weight_mode = pb::WeightMode::kUniform;
      break;
    default:
      pb::Fail(pb::ErrorCode::kInvalidArgument, "unknown weight mode");
  }
  params.uniform_final_bonus = p.uniform_final_bonus;
  params.Validate();
  return params;
}

pb::DecodeConfig ToDecodeConfig(const pb_decode_config& c) {
  pb::DecodeConfig config;
  config.lambda = c.lambda;
  config.beam_size = c.beam_size;
  config.max_symbols_per_frame = c.max_symbols_per_frame;
  config.eos_bump_enabled = c.eos_bump_enabled != 0;
  config.boost_enabled = c.boost_enabled != 0;
  config.keep_trace = c.keep_trace != 0;
  config.Validate();
  return config;
}

std::string StateText(const pb::ArcTable& table, int32_t state,
                      const pb::Vocabulary& vocab) {
  if (state == pb::ArcTable::kRoot) return "<root>";
  return pb::Detokenize(table.StateTokens(state), vocab);
}

std::unique_ptr<pb_result> MakeResult(pb::NBest nbest,
                                      const pb::Vocabulary& vocab,
                                      const pb::ArcTable* table) {
  auto result = std::make_unique<pb_result>();
  result->nbest = std::move(nbest);
  for (const pb::DecodeResult& r : result->nbest) {
    result->texts.push_back(pb::Detokenize(r.tokens, vocab));
  }
  if (!result->nbest.empty() && table != nullptr) {
    for (const pb::TraceStep& step : result->nbest.front().trace) {
      result->trace_tokens.push_back(vocab.token(step.token));
      result->trace_states.push_back(
          StateText(*table, step.tree_state, vocab));
    }
  }
  return result;
}

const pb::ArcTable* TableOrNull(const pb_table* table) {
  return table == nullptr ? nullptr : &table->table;
}

void CheckVocabSize(const pb_vocab* vocab, int vocab_size) {
  pb::Require(vocab->vocab.size() == vocab_size,
              "vocabulary has " + std::to_string(vocab->vocab.size()) +
                  " tokens but the model has " + std::to_string(vocab_size));
}

pb::NBest DecodeStep(pb_decode_mode mode, const pb::StepModel& model,
                     int num_frames, const pb::ArcTable* table,
                     const pb::DecodeConfig& config, int max_len) {
  switch (mode) {
    case PB_DECODE_RNNT_GREEDY:
      pb::Require(model.flavor() == pb::StepFlavor::kTransducer,
                  "rnnt decoding needs a transducer model");
      return {pb::TransducerGreedyDecode(model, num_frames, table, config)};
    case PB_DECODE_RNNT_BEAM:
      pb::Require(model.flavor() == pb::StepFlavor::kTransducer,
                  "rnnt decoding needs a transducer model");
      return pb::TransducerBeamDecode(model, num_frames, table, config);
    case PB_DECODE_AED_BEAM:
      pb::Require(model.flavor() == pb::StepFlavor::kAed,
                  "aed decoding needs an aed model");
      pb::Require(max_len >= 1, "aed decoding needs max_len >= 1");
      return pb::AedBeamDecode(model, table, config, max_len);
    default:
      pb::Fail(pb::ErrorCode::kInvalidArgument,
               "mode is not a step-model decoding mode");
  }
}

struct Utterance {
  std::string id;
  std::string text;
};

std::vector<Utterance> LoadJsonLines(const std::string& path) {
  std::vector<Utterance> out;
  std::set<std::string> seen;
  const std::vector<std::string> lines = pb::internal::ReadLines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(i + 1);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::exception& e) {
      pb::Fail(pb::ErrorCode::kInvalidArgument, where + ": " + e.what());
    }
    pb::Require(j.is_object() && j.contains("id") && j.contains("text") &&
                    j["text"].is_string(),
                where + ": expected {\"id\", \"text\"}");
    Utterance u;
    u.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    u.text = j["text"].get<std::string>();
    pb::Require(seen.insert(u.id).second, where + ": duplicate id " + u.id);
    out.push_back(std::move(u));
  }
  return out;
}

std::string Lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::vector<std::string> LoadPhrases(const std::string& path, int min_chars,
                                     bool case_sensitive) {
  std::vector<std::string> phrases;
  std::set<std::string> seen;
  for (const std::string& line : pb::internal::ReadLines(path)) {
    const size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string text = line.substr(first, line.find_last_not_of(" \t") - first + 1);
    if (static_cast<int>(pb::SplitUtf8(text).size()) < min_chars) continue;
    if (!seen.insert(case_sensitive ? text : Lower(text)).second) continue;
    phrases.push_back(text);
  }
  return phrases;
}

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

extern "C" {

const char* pb_last_error(void) { return g_last_error.c_str(); }

const char* pb_version(void) { return "1.0.0"; }

char* pb_string_dup(const char* s) {
  if (s == nullptr) return nullptr;
  try {
    return DupString(s);
  } catch (...) {
    return nullptr;
  }
}

void pb_string_free(char* s) { std::free(s); }

pb_status pb_vocab_load(const char* path, const char* blank_symbol,
                        const char* eos_symbol, pb_vocab** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    std::optional<std::string> blank, eos;
    if (blank_symbol != nullptr) blank = blank_symbol;
    if (eos_symbol != nullptr) eos = eos_symbol;
    *out = new pb_vocab{pb::LoadVocabulary(path, blank, eos)};
  });
}

void pb_vocab_free(pb_vocab* vocab) { delete vocab; }

int32_t pb_vocab_size(const pb_vocab* vocab) {
  return vocab == nullptr ? 0 : vocab->vocab.size();
}

int32_t pb_vocab_blank_id(const pb_vocab* vocab) {
  return vocab == nullptr ? -1 : vocab->vocab.blank_id().value_or(-1);
}

int32_t pb_vocab_eos_id(const pb_vocab* vocab) {
  return vocab == nullptr ? -1 : vocab->vocab.eos_id().value_or(-1);
}

pb_status pb_vocab_tokenize(const pb_vocab* vocab, const char* text,
                            int32_t ids_mode, int32_t** ids, size_t* count) {
  return Guard([&] {
    NotNull(vocab, "vocab");
    NotNull(text, "text");
    NotNull(ids, "ids");
    NotNull(count, "count");
    const std::vector<int> tokens = pb::Tokenize(
        text, vocab->vocab, ids_mode ? pb::TokenizeMode::kIds
                                     : pb::TokenizeMode::kChar);
    int32_t* buf = static_cast<int32_t*>(
        std::malloc(sizeof(int32_t) * std::max<size_t>(tokens.size(), 1)));
    if (buf == nullptr) throw std::bad_alloc();
    for (size_t i = 0; i < tokens.size(); ++i) buf[i] = tokens[i];
    *ids = buf;
    *count = tokens.size();
  });
}

void pb_ids_free(int32_t* ids) { std::free(ids); }

pb_status pb_context_list_load(const char* path, const pb_vocab* vocab,
                               pb_tokenize_mode mode, int32_t min_chars,
                               pb_context_list** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(vocab, "vocab");
    NotNull(out, "out");
    pb::Require(mode == PB_TOKENIZE_CHAR || mode == PB_TOKENIZE_IDS,
                "unknown tokenize mode");
    *out = new pb_context_list{pb::LoadContextList(
        path, vocab->vocab,
        mode == PB_TOKENIZE_IDS ? pb::TokenizeMode::kIds
                                : pb::TokenizeMode::kChar,
        min_chars)};
  });
}

void pb_context_list_free(pb_context_list* list) { delete list; }

int32_t pb_context_list_size(const pb_context_list* list) {
  return list == nullptr ? 0 : list->list.size();
}

int32_t pb_context_list_num_duplicates(const pb_context_list* list) {
  return list == nullptr ? 0 : list->list.num_duplicates;
}

int32_t pb_context_list_num_too_short(const pb_context_list* list) {
  return list == nullptr ? 0 : list->list.num_too_short;
}

pb_tree_params pb_tree_params_default(void) {
  const pb::TreeParams d;
  pb_tree_params p;
  p.c0 = d.c0;
  p.beta = d.beta;
  p.weight_mode = PB_WEIGHT_DEPTH_SCALED;
  p.uniform_final_bonus = d.uniform_final_bonus;
  p.unk_score = 0.0f;
  return p;
}

pb_status pb_table_build(const pb_context_list* list, const pb_vocab* vocab,
                         const pb_tree_params* params, pb_table** out) {
  return Guard([&] {
    NotNull(list, "list");
    NotNull(vocab, "vocab");
    NotNull(out, "out");
    const pb_tree_params p = params ? *params : pb_tree_params_default();
    pb::Require(std::isfinite(p.unk_score), "unk_score must be finite");
    const pb::PrefixTree tree =
        pb::BuildAutomaton(list->list, ToTreeParams(p), vocab->vocab.size());
    *out = new pb_table{pb::ArcTable::Compile(tree, p.unk_score)};
  });
}

pb_status pb_table_load(const char* path, pb_table** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new pb_table{pb::ArcTable::Load(path)};
  });
}

pb_status pb_table_save(const pb_table* table, const char* path) {
  return Guard([&] {
    NotNull(table, "table");
    NotNull(path, "path");
    table->table.Save(path);
  });
}

void pb_table_free(pb_table* table) { delete table; }

pb_status pb_table_get_summary(const pb_table* table, pb_table_summary* out) {
  return Guard([&] {
    NotNull(table, "table");
    NotNull(out, "out");
    const pb::ArcTable& t = table->table;
    out->num_states = t.num_states();
    out->num_arcs = t.num_arcs();
    out->num_finals = t.num_finals();
    out->max_depth = t.max_depth();
    out->vocab_size = t.vocab_size();
    out->unk_score = t.unk_score();
  });
}

pb_status pb_table_get_scores(const pb_table* table, const int32_t* states,
                              size_t num_states, float* scores,
                              int32_t* next_states) {
  return Guard([&] {
    NotNull(table, "table");
    NotNull(scores, "scores");
    NotNull(next_states, "next_states");
    if (num_states > 0) NotNull(states, "states");
    const pb::ArcTable& t = table->table;
    for (size_t b = 0; b < num_states; ++b) {
      pb::Require(t.IsValidState(states[b]),
                  "state " + std::to_string(states[b]) + " out of range");
    }
    pb::ScoreQueryResult res;
    t.GetScoresBatch({states, num_states}, &res);
    std::memcpy(scores, res.scores.data(), sizeof(float) * res.scores.size());
    std::memcpy(next_states, res.next_states.data(),
                sizeof(int32_t) * res.next_states.size());
  });
}

pb_status pb_tree_dump(const pb_context_list* list, const pb_vocab* vocab,
                       const pb_tree_params* params, char** out) {
  return Guard([&] {
    NotNull(list, "list");
    NotNull(vocab, "vocab");
    NotNull(out, "out");
    const pb_tree_params p = params ? *params : pb_tree_params_default();
    const pb::PrefixTree tree =
        pb::BuildAutomaton(list->list, ToTreeParams(p), vocab->vocab.size());
    *out = DupString(tree.DebugDump(&vocab->vocab));
  });
}

pb_status pb_emissions_load(const char* path, int32_t strict,
                            pb_emissions** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new pb_emissions{pb::LoadEmissions(path, strict != 0)};
  });
}

pb_status pb_emissions_save(const pb_emissions* em, const char* path) {
  return Guard([&] {
    NotNull(em, "emissions");
    NotNull(path, "path");
    pb::SaveEmissions(em->em, path);
  });
}

void pb_emissions_free(pb_emissions* em) { delete em; }

int32_t pb_emissions_num_frames(const pb_emissions* em) {
  return em == nullptr ? 0 : em->em.num_frames;
}

int32_t pb_emissions_vocab_size(const pb_emissions* em) {
  return em == nullptr ? 0 : em->em.vocab_size;
}

void pb_emissions_set_frame_duration(pb_emissions* em, float seconds) {
  if (em != nullptr && seconds > 0.0f) em->em.frame_duration = seconds;
}

pb_status pb_emissions_set_blank_id(pb_emissions* em, int32_t blank_id) {
  return Guard([&] {
    NotNull(em, "emissions");
    pb::Require(blank_id >= 0 && blank_id < em->em.vocab_size,
                "blank id out of range");
    em->em.blank_id = blank_id;
  });
}

double pb_emissions_duration(const pb_emissions* em) {
  return em == nullptr ? 0.0 : em->em.duration_seconds();
}

pb_synth_options pb_synth_options_default(void) {
  const pb::SynthOptions d;
  pb_synth_options o;
  o.margin = d.margin;
  o.seed = d.seed;
  o.frames_per_token = d.frames_per_token;
  o.blank_frames = d.blank_frames;
  o.clean_gap = d.clean_gap;
  return o;
}

pb_status pb_emissions_synth_ctc(const int32_t* target, size_t target_len,
                                 int32_t vocab_size, int32_t blank_id,
                                 const pb_synth_options* options,
                                 const uint8_t* designated,
                                 const int32_t* avoid, size_t avoid_len,
                                 pb_emissions** out) {
  return Guard([&] {
    NotNull(out, "out");
    if (target_len > 0) NotNull(target, "target");
    if (avoid_len > 0) NotNull(avoid, "avoid");
    const pb_synth_options o = options ? *options : pb_synth_options_default();
    pb::SynthOptions opts;
    opts.margin = o.margin;
    opts.seed = o.seed;
    opts.frames_per_token = o.frames_per_token;
    opts.blank_frames = o.blank_frames;
    opts.clean_gap = o.clean_gap;
    if (designated != nullptr) {
      opts.designated.assign(designated, designated + target_len);
    }
    opts.avoid.assign(avoid, avoid + avoid_len);
    const std::vector<int> tgt(target, target + target_len);
    *out = new pb_emissions{
        pb::SynthCtcEmissions(tgt, vocab_size, blank_id, opts)};
  });
}

pb_status pb_step_model_load(const char* path, pb_step_model** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new pb_step_model{pb::TableStepModel::Load(path)};
  });
}

void pb_step_model_free(pb_step_model* model) { delete model; }

int32_t pb_step_model_num_frames(const pb_step_model* model) {
  return model == nullptr ? 0 : model->model.num_frames();
}

int32_t pb_step_model_vocab_size(const pb_step_model* model) {
  return model == nullptr ? 0 : model->model.vocab_size();
}

pb_decode_config pb_decode_config_default(pb_decode_mode mode) {
  const pb::DecodeConfig d;
  pb_decode_config c;
  c.lambda = d.lambda;
  c.beam_size =
      mode == PB_DECODE_AED_BEAM ? pb::kDefaultAedBeamSize : d.beam_size;
  c.max_symbols_per_frame = d.max_symbols_per_frame;
  c.eos_bump_enabled = d.eos_bump_enabled ? 1 : 0;
  c.boost_enabled = d.boost_enabled ? 1 : 0;
  c.keep_trace = d.keep_trace ? 1 : 0;
  c.num_frames = 0;
  c.max_len = 0;
  return c;
}

pb_status pb_decode_emissions(pb_decode_mode mode, const pb_emissions* em,
                              const pb_table* table, const pb_vocab* vocab,
                              const pb_decode_config* config,
                              pb_result** out) {
  return Guard([&] {
    NotNull(em, "emissions");
    NotNull(vocab, "vocab");
    NotNull(out, "out");
    CheckVocabSize(vocab, em->em.vocab_size);
    const pb_decode_config c = config ? *config : pb_decode_config_default(mode);
    const pb::DecodeConfig cfg = ToDecodeConfig(c);
    const pb::ArcTable* t = TableOrNull(table);
    pb::NBest nbest;
    switch (mode) {
      case PB_DECODE_CTC_GREEDY:
        nbest = {pb::CtcGreedyDecode(em->em, t, cfg)};
        break;
      case PB_DECODE_CTC_BEAM:
        nbest = pb::CtcBeamDecode(em->em, t, cfg);
        break;
      case PB_DECODE_RNNT_GREEDY:
      case PB_DECODE_RNNT_BEAM: {
        pb::Require(em->em.blank_id.has_value(),
                    "transducer decoding needs a blank id");
        const pb::TableStepModel model = pb::TableStepModel::FromEmissions(
            em->em, pb::StepFlavor::kTransducer, em->em.blank_id,
            std::nullopt);
        const int frames = c.num_frames > 0 ? c.num_frames : em->em.num_frames;
        nbest = DecodeStep(mode, model, frames, t, cfg, c.max_len);
        break;
      }
      case PB_DECODE_AED_BEAM: {
        const pb::TableStepModel model = pb::TableStepModel::FromEmissions(
            em->em, pb::StepFlavor::kAed, vocab->vocab.blank_id(),
            vocab->vocab.eos_id());
        nbest = DecodeStep(mode, model, 0, t, cfg, c.max_len);
        break;
      }
      default:
        pb::Fail(pb::ErrorCode::kInvalidArgument, "unknown decode mode");
    }
    *out = MakeResult(std::move(nbest), vocab->vocab, t).release();
  });
}

pb_status pb_decode_step_model(pb_decode_mode mode, const pb_step_model* model,
                               const pb_table* table, const pb_vocab* vocab,
                               const pb_decode_config* config,
                               pb_result** out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(vocab, "vocab");
    NotNull(out, "out");
    CheckVocabSize(vocab, model->model.vocab_size());
    const pb_decode_config c = config ? *config : pb_decode_config_default(mode);
    const pb::DecodeConfig cfg = ToDecodeConfig(c);
    const pb::ArcTable* t = TableOrNull(table);
    int frames = c.num_frames > 0 ? c.num_frames : model->model.num_frames();
    if (mode == PB_DECODE_RNNT_GREEDY || mode == PB_DECODE_RNNT_BEAM) {
      pb::Require(frames > 0,
                  "transducer decoding needs a frame count (model has no "
                  "\"frames\" and num_frames is 0)");
    }
    pb::NBest nbest = DecodeStep(mode, model->model, frames, t, cfg, c.max_len);
    *out = MakeResult(std::move(nbest), vocab->vocab, t).release();
  });
}

void pb_result_free(pb_result* result) { delete result; }

int32_t pb_result_num_hypotheses(const pb_result* result) {
  return result == nullptr ? 0 : static_cast<int32_t>(result->nbest.size());
}

pb_status pb_result_tokens(const pb_result* result, int32_t rank,
                           const int32_t** tokens, size_t* count) {
  return Guard([&] {
    NotNull(result, "result");
    NotNull(tokens, "tokens");
    NotNull(count, "count");
    pb::Require(rank >= 0 && rank < pb_result_num_hypotheses(result),
                "rank out of range");
    const std::vector<int>& t = result->nbest[rank].tokens;
    static_assert(sizeof(int) == sizeof(int32_t));
    *tokens = reinterpret_cast<const int32_t*>(t.data());
    *count = t.size();
  });
}

pb_status pb_result_scores(const pb_result* result, int32_t rank,
                           float* am_score, float* boost_score) {
  return Guard([&] {
    NotNull(result, "result");
    pb::Require(rank >= 0 && rank < pb_result_num_hypotheses(result),
                "rank out of range");
    if (am_score != nullptr) *am_score = result->nbest[rank].am_score;
    if (boost_score != nullptr) *boost_score = result->nbest[rank].boost_score;
  });
}

pb_status pb_result_to_json(const pb_result* result, const char* id,
                            int32_t with_trace, char** out) {
  return Guard([&] {
    NotNull(result, "result");
    NotNull(out, "out");
    pb::Require(!result->nbest.empty(), "result holds no hypothesis");
    const pb::DecodeResult& best = result->nbest.front();
    ordered_json j;
    j["id"] = id ? id : "";
    j["text"] = result->texts.front();
    j["tokens"] = best.tokens;
    j["am_score"] = best.am_score;
    j["boost_score"] = best.boost_score;
    if (with_trace) {
      ordered_json trace = ordered_json::array();
      for (size_t i = 0; i < best.trace.size(); ++i) {
        const pb::TraceStep& s = best.trace[i];
        ordered_json step;
        step["step"] = s.step;
        step["token"] = i < result->trace_tokens.size()
                            ? result->trace_tokens[i]
                            : std::to_string(s.token);
        step["boost"] = s.boost_delta;
        step["state"] = i < result->trace_states.size()
                            ? result->trace_states[i]
                            : std::to_string(s.tree_state);
        trace.push_back(std::move(step));
      }
      j["trace"] = std::move(trace);
    }
    *out = DupString(j.dump());
  });
}

pb_status pb_evaluate(const char* refs_path, const char* hyps_path,
                      const char* phrases_path, int32_t min_chars,
                      int32_t case_sensitive, char** report_json,
                      char** report_table) {
  return Guard([&] {
    NotNull(refs_path, "refs_path");
    NotNull(hyps_path, "hyps_path");
    const std::vector<Utterance> refs = LoadJsonLines(refs_path);
    const std::vector<Utterance> hyps = LoadJsonLines(hyps_path);
    pb::Require(refs.size() == hyps.size(),
                "reference / hypothesis count mismatch: " +
                    std::to_string(refs.size()) + " vs " +
                    std::to_string(hyps.size()));
    std::map<std::string, const Utterance*> hyp_by_id;
    for (const Utterance& u : hyps) hyp_by_id[u.id] = &u;
    std::vector<pb::Words> ref_words, hyp_words;
    for (const Utterance& r : refs) {
      auto it = hyp_by_id.find(r.id);
      pb::Require(it != hyp_by_id.end(), "no hypothesis for id " + r.id);
      ref_words.push_back(pb::SplitWords(r.text));
      hyp_words.push_back(pb::SplitWords(it->second->text));
    }
    pb::EditCounts edits;
    for (size_t u = 0; u < refs.size(); ++u) {
      const pb::EditCounts e = pb::AlignWords(ref_words[u], hyp_words[u]);
      edits.substitutions += e.substitutions;
      edits.insertions += e.insertions;
      edits.deletions += e.deletions;
      edits.reference_length += e.reference_length;
    }
    const double wer = pb::CorpusWer(ref_words, hyp_words);

    ordered_json j;
    j["num_utterances"] = refs.size();
    j["wer"] = wer;
    j["substitutions"] = edits.substitutions;
    j["insertions"] = edits.insertions;
    j["deletions"] = edits.deletions;
    j["reference_words"] = edits.reference_length;
    std::ostringstream table;
    table << "WER " << Percent(wer) << "%\n";
    if (phrases_path != nullptr) {
      const std::vector<std::string> phrases =
          LoadPhrases(phrases_path, min_chars, case_sensitive != 0);
      const pb::KeyphraseScore ks = pb::KeyphrasePrf(
          ref_words, hyp_words, phrases, case_sensitive == 0);
      j["precision"] = ks.precision;
      j["recall"] = ks.recall;
      j["fscore"] = ks.fscore;
      j["tp"] = ks.tp;
      j["fp"] = ks.fp;
      j["fn"] = ks.fn;
      ordered_json per = ordered_json::array();
      table << "F-score (P/R) " << Percent(ks.fscore) << " ("
            << Percent(ks.precision) << "/" << Percent(ks.recall) << ")\n";
      table << "phrase\tref\thyp\ttp\tfp\tfn\n";
      for (const pb::PhraseCounts& pc : ks.per_phrase) {
        ordered_json row;
        row["phrase"] = pc.phrase;
        row["ref_count"] = pc.ref_count;
        row["hyp_count"] = pc.hyp_count;
        row["tp"] = pc.tp;
        row["fp"] = pc.fp;
        row["fn"] = pc.fn;
        per.push_back(std::move(row));
        table << pc.phrase << "\t" << pc.ref_count << "\t" << pc.hyp_count
              << "\t" << pc.tp << "\t" << pc.fp << "\t" << pc.fn << "\n";
      }
      j["phrases"] = std::move(per);
    }
    if (report_json != nullptr) *report_json = DupString(j.dump());
    if (report_table != nullptr) *report_table = DupString(table.str());
  });
}

pb_status pb_rtfx(double audio_seconds, double wall_seconds, double* out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = pb::Rtfx(audio_seconds, wall_seconds);
  });
}

pb_status pb_bench(pb_bench_fn fn, void* user_data, int32_t runs,
                   int32_t warmup, double audio_seconds, double* run_seconds,
                   pb_bench_report* report) {
  return Guard([&] {
    pb::Require(fn != nullptr, "fn must not be null");
    NotNull(report, "report");
    auto run = [&]() -> std::string {
      char* output = nullptr;
      const pb_status status = fn(user_data, &output);
      std::string text = output ? output : "";
      pb_string_free(output);
      if (status != PB_OK) {
        pb::Fail(pb::ErrorCode::kInternal,
                 "decoder run failed: " + std::string(pb_last_error()));
      }
      return text;
    };
    const pb::BenchReport r = pb::Bench(run, audio_seconds, runs, warmup);
    report->warmup = r.warmup;
    report->runs_completed = static_cast<int32_t>(r.run_seconds.size());
    report->mean_seconds = r.mean_seconds;
    report->audio_seconds = r.audio_seconds;
    report->rtfx = r.rtfx;
    report->deterministic = r.deterministic ? 1 : 0;
    if (run_seconds != nullptr) {
      for (size_t i = 0; i < r.run_seconds.size(); ++i) {
        run_seconds[i] = r.run_seconds[i];
      }
    }
    if (!r.ok()) pb::Fail(pb::ErrorCode::kInternal, r.error);
  });
}

}  // extern "C"
