// dlm.cc
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

#include "dualm/dlm.h"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "dualm/arpa.h"
#include "dualm/random.h"
#include "dualm/util.h"

namespace dualm {

std::optional<LanguageId> DualLM::lang_of(const std::string& surface) const {
  if (vocab1.count(surface)) return LanguageId::L1;
  if (vocab2.count(surface)) return LanguageId::L2;
  return std::nullopt;
}

DualLM assemble_dual(MonolingualLM lm1, MonolingualLM lm2) {
  if (lm1.lang == lm2.lang) throw Error("both models claim the same language");
  DualLM dlm;
  dlm.vocab1 = lm1.model.content_vocab();
  dlm.vocab2 = lm2.model.content_vocab();
  for (const auto& w : dlm.vocab1) {
    if (dlm.vocab2.count(w)) {
      throw Error("vocabularies overlap on \"" + w + "\"");
    }
  }
  dlm.lm1 = std::move(lm1);
  dlm.lm2 = std::move(lm2);
  return dlm;
}

namespace {

double linear_prob(const BackoffBigramModel& m, const std::string& h,
                   const std::string& w) {
  return std::exp(m.cond_logprob(h, w));
}

// Sum of P[w|history] over the content vocabulary.
double in_vocab_mass(const BackoffBigramModel& m,
                     const std::set<std::string>& content,
                     const std::string& history) {
  std::vector<double> terms;
  terms.reserve(content.size());
  for (const auto& w : content) terms.push_back(linear_prob(m, history, w));
  return compensated_sum(terms);
}

// Rescales the explicit entries and the backoff weight of one history row by
// the given log factor, then pins the listed targets to exact zero.
void rescale_row(BackoffBigramModel& m, const std::string& history,
                 double log_factor,
                 std::initializer_list<const char*> zeroed) {
  auto& row = m.rows.at(history);
  for (auto& [w, lp] : row) {
    if (lp != kNegInf) lp += log_factor;
  }
  auto bit = m.backoff.find(history);
  if (bit != m.backoff.end() && bit->second != kNegInf) {
    bit->second += log_factor;
  }
  for (const char* w : zeroed) row[w] = kNegInf;
}

// Applies conditions (3) and (4) to one model's <sw> row.
void enforce_switch_row(BackoffBigramModel& m,
                        const std::set<std::string>& content,
                        const std::string& which) {
  if (!m.has_history(kSwitch)) {
    throw Error(which + ": model has no <sw> context to reweight");
  }
  double mass = in_vocab_mass(m, content, kSwitch);
  if (mass <= 1e-12) {
    throw Error(which +
                ": <sw> row has no in-vocabulary mass (model never leaves a "
                "switch)");
  }
  rescale_row(m, kSwitch, -std::log(mass), {kSwitch, kSentEnd});
}

// Applies conditions (1) and (2) to one model's <s> row given the jointly
// rescaled start-switch probability.
void enforce_start_row(BackoffBigramModel& m,
                       const std::set<std::string>& content,
                       double s_hat, const std::string& which) {
  if (!m.has_history(kSentStart)) {
    throw Error(which + ": model has no <s> context");
  }
  double mass = in_vocab_mass(m, content, kSentStart);
  auto& row = m.rows.at(kSentStart);
  if (1.0 - s_hat <= 1e-12) {
    // This side never gets the first turn; all its start mass sits on <sw>.
    for (auto& [w, lp] : row) lp = kNegInf;
    m.backoff[kSentStart] = kNegInf;
  } else {
    if (mass <= 1e-15) {
      throw Error(which + ": <s> row has no in-vocabulary mass");
    }
    rescale_row(m, kSentStart, std::log1p(-s_hat) - std::log(mass),
                {kSentEnd});
  }
  row[kSwitch] = s_hat > 0.0 ? std::log(s_hat) : kNegInf;
  row[kSentEnd] = kNegInf;
}

}  // namespace

DualLM enforce_conditions(BackoffBigramModel lm1, BackoffBigramModel lm2) {
  MonolingualLM m1{std::move(lm1), LanguageId::L1, false};
  MonolingualLM m2{std::move(lm2), LanguageId::L2, false};
  DualLM dlm = assemble_dual(std::move(m1), std::move(m2));

  enforce_switch_row(dlm.lm1.model, dlm.vocab1, "lm1");
  enforce_switch_row(dlm.lm2.model, dlm.vocab2, "lm2");

  double s1 = dlm.lm1.model.has_history(kSentStart)
                  ? std::exp(dlm.lm1.model.cond_logprob(kSentStart, kSwitch))
                  : throw Error("lm1: model has no <s> context");
  double s2 = dlm.lm2.model.has_history(kSentStart)
                  ? std::exp(dlm.lm2.model.cond_logprob(kSentStart, kSwitch))
                  : throw Error("lm2: model has no <s> context");
  if (s1 + s2 <= 1e-12) {
    throw Error(
        "start-switch probabilities are both zero; no evidence of either "
        "language starting");
  }
  double s1_hat = s1 / (s1 + s2);
  double s2_hat = s2 / (s1 + s2);

  enforce_start_row(dlm.lm1.model, dlm.vocab1, s1_hat, "lm1");
  enforce_start_row(dlm.lm2.model, dlm.vocab2, s2_hat, "lm2");

  dlm.lm1.conditions_enforced = true;
  dlm.lm2.conditions_enforced = true;
  return dlm;
}

double combined_logprob(const DualLM& dlm, const std::string& history,
                        const std::string& next) {
  if (history == kSentEnd) {
    throw Error("combined conditional undefined for history </s>");
  }
  if (next == kSentStart || next == kSwitch) {
    throw Error("markers cannot be predicted by the combined model");
  }
  const bool next_is_end = next == kSentEnd;

  if (history == kSentStart) {
    if (next_is_end) return kNegInf;  // condition (1)
    auto lang = dlm.lang_of(next);
    if (!lang) throw Error("unknown word \"" + next + "\"");
    return dlm.side(*lang).model.cond_logprob(kSentStart, next);
  }

  auto hist_lang = dlm.lang_of(history);
  if (!hist_lang) throw Error("unknown history \"" + history + "\"");
  const auto& own = dlm.side(*hist_lang).model;
  if (next_is_end) return own.cond_logprob(history, kSentEnd);

  auto next_lang = dlm.lang_of(next);
  if (!next_lang) throw Error("unknown word \"" + next + "\"");
  if (*next_lang == *hist_lang) return own.cond_logprob(history, next);

  const auto& other = dlm.side(*next_lang).model;
  double to_switch = own.cond_logprob(history, kSwitch);
  double from_switch = other.cond_logprob(kSwitch, next);
  if (to_switch == kNegInf || from_switch == kNegInf) return kNegInf;
  return to_switch + from_switch;
}

double combined_prob(const DualLM& dlm, const std::string& history,
                     const std::string& next) {
  return std::exp(combined_logprob(dlm, history, next));
}

std::string oov_policy_name(OovPolicy policy) {
  return policy == OovPolicy::kSkip ? "skip" : "closed";
}

std::optional<OovPolicy> parse_oov_policy(std::string_view name) {
  if (name == "skip") return OovPolicy::kSkip;
  if (name == "closed") return OovPolicy::kClosed;
  return std::nullopt;
}

namespace {

// Scoring history: sentence start, an in-vocabulary word, or an OOV word
// carrying only its language tag.
struct ScoreState {
  enum class Kind { kStart, kWord, kOov } kind = Kind::kStart;
  std::string word;
  LanguageId lang = LanguageId::L1;
};

double dlm_transition(const DualLM& dlm, const ScoreState& state,
                      const std::string& next, bool next_is_end,
                      LanguageId next_lang) {
  switch (state.kind) {
    case ScoreState::Kind::kStart:
      return combined_logprob(dlm, kSentStart, next_is_end ? kSentEnd : next);
    case ScoreState::Kind::kWord:
      return combined_logprob(dlm, state.word, next_is_end ? kSentEnd : next);
    case ScoreState::Kind::kOov: {
      // Unigram backoff for an unseen history, per its tagged language.
      const auto& own = dlm.side(state.lang).model;
      if (next_is_end) return own.unigram_logprob(kSentEnd);
      if (next_lang == state.lang) return own.unigram_logprob(next);
      const auto& other = dlm.side(next_lang).model;
      double to_switch = own.unigram_logprob(kSwitch);
      double from_switch = other.cond_logprob(kSwitch, next);
      if (to_switch == kNegInf || from_switch == kNegInf) return kNegInf;
      return to_switch + from_switch;
    }
  }
  return kNegInf;
}

std::string state_label(const ScoreState& state) {
  return state.kind == ScoreState::Kind::kStart ? kSentStart : state.word;
}

}  // namespace

ScoreBreakdown score_sentence(const DualLM& dlm,
                              std::span<const TaggedToken> sentence,
                              OovPolicy policy) {
  if (sentence.empty()) throw Error("cannot score an empty sentence");
  ScoreBreakdown breakdown;
  ScoreState state;

  auto source_of = [&](LanguageId hist_lang, bool cross,
                       bool from_start) -> Transition::Source {
    if (cross) return Transition::Source::kSwitchProduct;
    (void)from_start;
    return hist_lang == LanguageId::L1 ? Transition::Source::kL1
                                       : Transition::Source::kL2;
  };

  for (const auto& tok : sentence) {
    auto lang = dlm.lang_of(tok.surface);
    if (!lang) {
      if (policy == OovPolicy::kClosed) {
        throw Error("OOV token \"" + tok.surface +
                    "\" under the closed policy");
      }
      ++breakdown.oov_skipped;
      state = ScoreState{ScoreState::Kind::kOov, tok.surface, tok.lang};
      continue;
    }
    double lp = dlm_transition(dlm, state, tok.surface, false, *lang);
    bool from_start = state.kind == ScoreState::Kind::kStart;
    LanguageId hist_lang =
        state.kind == ScoreState::Kind::kWord || state.kind == ScoreState::Kind::kOov
            ? state.lang
            : *lang;  // first transition is attributed to the word's side
    bool cross = !from_start && hist_lang != *lang;
    breakdown.per_transition.push_back(Transition{
        state_label(state), tok.surface, lp,
        source_of(cross ? hist_lang : *lang, cross, from_start)});
    breakdown.total_logprob += lp;
    state = ScoreState{ScoreState::Kind::kWord, tok.surface, *lang};
  }

  double lp = dlm_transition(dlm, state, kSentEnd, true, LanguageId::L1);
  LanguageId end_lang =
      state.kind == ScoreState::Kind::kStart ? LanguageId::L1 : state.lang;
  breakdown.per_transition.push_back(
      Transition{state_label(state), kSentEnd, lp,
                 end_lang == LanguageId::L1 ? Transition::Source::kL1
                                            : Transition::Source::kL2});
  breakdown.total_logprob += lp;
  breakdown.token_count =
      sentence.size() - breakdown.oov_skipped + 1;
  return breakdown;
}

ScoreBreakdown score_sentence(const BackoffBigramModel& model,
                              std::span<const std::string> sentence,
                              OovPolicy policy) {
  if (sentence.empty()) throw Error("cannot score an empty sentence");
  ScoreBreakdown breakdown;
  ScoreState state;

  auto in_model = [&](const std::string& w) {
    return model.unigram.count(w) > 0 && w != kSentEnd;
  };
  auto transition = [&](const std::string& next) -> double {
    switch (state.kind) {
      case ScoreState::Kind::kStart:
        return model.cond_logprob(kSentStart, next);
      case ScoreState::Kind::kWord:
        return model.cond_logprob(state.word, next);
      case ScoreState::Kind::kOov:
        return model.unigram_logprob(next);
    }
    return kNegInf;
  };

  for (const auto& tok : sentence) {
    if (!in_model(tok)) {
      if (policy == OovPolicy::kClosed) {
        throw Error("OOV token \"" + tok + "\" under the closed policy");
      }
      ++breakdown.oov_skipped;
      state = ScoreState{ScoreState::Kind::kOov, tok, LanguageId::L1};
      continue;
    }
    double lp = transition(tok);
    breakdown.per_transition.push_back(Transition{
        state_label(state), tok, lp, Transition::Source::kPlain});
    breakdown.total_logprob += lp;
    state = ScoreState{ScoreState::Kind::kWord, tok, LanguageId::L1};
  }
  double lp = transition(kSentEnd);
  breakdown.per_transition.push_back(Transition{
      state_label(state), kSentEnd, lp, Transition::Source::kPlain});
  breakdown.total_logprob += lp;
  breakdown.token_count = sentence.size() - breakdown.oov_skipped + 1;
  return breakdown;
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  out << "model=" << model << "\n";
  out << "smoothing=" << smoothing << "\n";
  out << "split=" << split << "\n";
  out << "ppl=" << format_fixed(ppl, 6) << "\n";
  out << "oov_count=" << oov_count << "\n";
  out << "tokens=" << tokens << "\n";
  return out.str();
}

namespace {

template <typename ScoreFn>
EvalReport perplexity_impl(const Corpus& corpus, const EvalOptions& opts,
                           ScoreFn&& score, bool parallel, int threads) {
  if (corpus.utterances.empty()) {
    throw Error("cannot evaluate perplexity on an empty corpus");
  }
  const std::size_t n = corpus.utterances.size();
  std::vector<double> logprobs(n, 0.0);
  std::vector<uint64_t> token_counts(n, 0);
  std::vector<uint64_t> oovs(n, 0);

  std::string first_error;
  bool failed = false;

  auto run_one = [&](std::size_t i) {
    ScoreBreakdown b = score(corpus.utterances[i]);
    logprobs[i] = b.total_logprob;
    token_counts[i] = b.token_count;
    oovs[i] = b.oov_skipped;
  };

  if (parallel) {
#ifdef _OPENMP
    int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (std::size_t i = 0; i < n; ++i) {
      try {
        run_one(i);
      } catch (const std::exception& e) {
#pragma omp critical
        {
          if (!failed) {
            failed = true;
            first_error = e.what();
          }
        }
      }
    }
#else
    (void)threads;
    for (std::size_t i = 0; i < n; ++i) run_one(i);
#endif
  } else {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
  }
  if (failed) throw Error(first_error);

  // A -inf sentence poisons compensated summation; short-circuit it.
  bool any_zero = false;
  for (double lp : logprobs) any_zero |= lp == kNegInf;
  double total_logprob = any_zero ? kNegInf : compensated_sum(logprobs);
  uint64_t tokens = 0, oov_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tokens += token_counts[i];
    oov_count += oovs[i];
  }

  EvalReport report;
  report.model = opts.model_name;
  report.smoothing = opts.smoothing;
  report.split = opts.split;
  report.tokens = tokens;
  report.oov_count = oov_count;
  report.ppl = total_logprob == kNegInf
                   ? kPosInf
                   : std::exp(-total_logprob / static_cast<double>(tokens));
  return report;
}

}  // namespace

EvalReport evaluate_perplexity(const DualLM& dlm, const Corpus& corpus,
                               const EvalOptions& opts) {
  return perplexity_impl(
      corpus, opts,
      [&](const Utterance& u) {
        return score_sentence(dlm, u.tokens, opts.oov);
      },
      false, 0);
}

EvalReport evaluate_perplexity(const BackoffBigramModel& model,
                               const Corpus& corpus, const EvalOptions& opts) {
  return perplexity_impl(
      corpus, opts,
      [&](const Utterance& u) {
        std::vector<std::string> surfaces;
        surfaces.reserve(u.tokens.size());
        for (const auto& t : u.tokens) surfaces.push_back(t.surface);
        return score_sentence(model, surfaces, opts.oov);
      },
      false, 0);
}

EvalReport evaluate_perplexity_parallel(const DualLM& dlm,
                                        const Corpus& corpus,
                                        const EvalOptions& opts,
                                        int threads) {
  return perplexity_impl(
      corpus, opts,
      [&](const Utterance& u) {
        return score_sentence(dlm, u.tokens, opts.oov);
      },
      true, threads);
}

EvalReport evaluate_perplexity_parallel(const BackoffBigramModel& model,
                                        const Corpus& corpus,
                                        const EvalOptions& opts,
                                        int threads) {
  return perplexity_impl(
      corpus, opts,
      [&](const Utterance& u) {
        std::vector<std::string> surfaces;
        surfaces.reserve(u.tokens.size());
        for (const auto& t : u.tokens) surfaces.push_back(t.surface);
        return score_sentence(model, surfaces, opts.oov);
      },
      true, threads);
}

DlmSampler::DlmSampler(const DualLM& dlm) {
  for (const auto& w : dlm.vocab1) {
    words_.push_back(TaggedToken{w, LanguageId::L1});
  }
  for (const auto& w : dlm.vocab2) {
    words_.push_back(TaggedToken{w, LanguageId::L2});
  }
  const std::size_t k = words_.size();

  auto build_row = [&](const std::string& history) {
    std::vector<double> cum(k + 1);  // candidates then </s>
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      acc += combined_prob(dlm, history, words_[i].surface);
      cum[i] = acc;
    }
    acc += combined_prob(dlm, history, kSentEnd);
    cum[k] = acc;
    return cum;
  };

  start_cumulative_ = build_row(kSentStart);
  cumulative_.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    cumulative_.push_back(build_row(words_[i].surface));
  }
}

SampleResult DlmSampler::sample(uint64_t seed, std::size_t max_len) const {
  if (max_len == 0) throw Error("sample: max_len must be at least 1");
  Rng rng(seed);
  SampleResult result;
  const std::vector<double>* row = &start_cumulative_;
  const std::size_t k = words_.size();
  for (;;) {
    double u = rng.uniform() * row->back();
    std::size_t pick =
        std::lower_bound(row->begin(), row->end(), u) - row->begin();
    if (pick > k) pick = k;
    // Skip zero-probability candidates the search may have landed on.
    while (pick < k &&
           (*row)[pick] == (pick == 0 ? 0.0 : (*row)[pick - 1])) {
      ++pick;
    }
    if (pick == k) {
      if (result.tokens.empty()) {
        // Condition (1) makes </s> impossible from <s>; numeric fallback.
        pick = 0;
        while (pick < k && (*row)[pick] <= 0.0) ++pick;
        if (pick == k) throw Error("sample: start row has no mass");
      } else {
        return result;
      }
    }
    result.tokens.push_back(words_[pick]);
    if (result.tokens.size() >= max_len) {
      result.truncated = true;
      return result;
    }
    row = &cumulative_[pick];
  }
}

SampleResult sample(const DualLM& dlm, uint64_t seed, std::size_t max_len) {
  return DlmSampler(dlm).sample(seed, max_len);
}

double MassTable::cumulative(std::size_t max_len) const {
  double acc = 0.0;
  for (std::size_t len = 1; len < per_length.size() && len <= max_len; ++len) {
    acc += per_length[len];
  }
  return acc;
}

MassTable enumerate_mass(const DualLM& dlm, std::size_t max_len) {
  std::vector<std::string> words(dlm.vocab1.begin(), dlm.vocab1.end());
  words.insert(words.end(), dlm.vocab2.begin(), dlm.vocab2.end());
  if (words.size() > 12) {
    throw Error("enumerate_mass: vocabulary too large (" +
                std::to_string(words.size()) + " > 12)");
  }
  if (max_len == 0) throw Error("enumerate_mass: max_len must be at least 1");
  const std::size_t k = words.size();

  std::vector<double> start(k), end(k);
  std::vector<std::vector<double>> trans(k, std::vector<double>(k));
  for (std::size_t i = 0; i < k; ++i) {
    start[i] = combined_prob(dlm, kSentStart, words[i]);
    end[i] = combined_prob(dlm, words[i], kSentEnd);
    for (std::size_t j = 0; j < k; ++j) {
      trans[i][j] = combined_prob(dlm, words[i], words[j]);
    }
  }

  MassTable table;
  table.per_length.assign(max_len + 1, 0.0);
  std::vector<double> prefix = start;  // mass of length-L prefixes per word
  for (std::size_t len = 1; len <= max_len; ++len) {
    double mass = 0.0;
    for (std::size_t i = 0; i < k; ++i) mass += prefix[i] * end[i];
    table.per_length[len] = mass;
    if (len == max_len) break;
    std::vector<double> next(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      if (prefix[i] == 0.0) continue;
      for (std::size_t j = 0; j < k; ++j) {
        next[j] += prefix[i] * trans[i][j];
      }
    }
    prefix.swap(next);
  }
  table.total = table.cumulative(max_len);
  return table;
}

namespace {

constexpr double kConditionTolerance = 1e-9;

// P[w|h] or nullopt when the history row is missing entirely.
std::optional<double> checked_prob(const BackoffBigramModel& m,
                                   const std::string& h,
                                   const std::string& w) {
  if (!m.has_history(h)) return std::nullopt;
  return std::exp(m.cond_logprob(h, w));
}

void check_zero(const BackoffBigramModel& m, const std::string& which,
                const std::string& condition, const std::string& h,
                const std::string& w,
                std::vector<ConditionViolation>& out) {
  auto p = checked_prob(m, h, w);
  if (!p) {
    out.push_back({condition, which + ":" + h, 1.0});
    return;
  }
  if (*p > kConditionTolerance) {
    out.push_back({condition, which + ":" + h, *p});
  }
}

void check_rows(const BackoffBigramModel& m, const std::string& which,
                std::vector<ConditionViolation>& out) {
  auto targets = m.target_words();
  for (const auto& [h, row] : m.rows) {
    if (h == kSentEnd) {
      out.push_back({"eos-history", which + ":" + h, 1.0});
      continue;
    }
    std::vector<double> terms;
    terms.reserve(targets.size());
    for (const auto& w : targets) {
      terms.push_back(std::exp(m.cond_logprob(h, w)));
    }
    double sum = compensated_sum(terms);
    if (std::abs(sum - 1.0) > kConditionTolerance) {
      out.push_back({"row-normalization", which + ":" + h,
                     std::abs(sum - 1.0)});
    }
  }
}

}  // namespace

std::vector<ConditionViolation> validate(const DualLM& dlm) {
  std::vector<ConditionViolation> violations;

  check_zero(dlm.lm1.model, "lm1", "condition1", kSentStart, kSentEnd,
             violations);
  check_zero(dlm.lm2.model, "lm2", "condition1", kSentStart, kSentEnd,
             violations);

  auto s1 = checked_prob(dlm.lm1.model, kSentStart, kSwitch);
  auto s2 = checked_prob(dlm.lm2.model, kSentStart, kSwitch);
  if (!s1 || !s2) {
    violations.push_back({"condition2", "<s>", 1.0});
  } else {
    double residual = std::abs(*s1 + *s2 - 1.0);
    if (residual > kConditionTolerance) {
      violations.push_back({"condition2", "<s>", residual});
    }
  }

  check_zero(dlm.lm1.model, "lm1", "condition3", kSwitch, kSwitch, violations);
  check_zero(dlm.lm2.model, "lm2", "condition3", kSwitch, kSwitch, violations);
  check_zero(dlm.lm1.model, "lm1", "condition4", kSwitch, kSentEnd,
             violations);
  check_zero(dlm.lm2.model, "lm2", "condition4", kSwitch, kSentEnd,
             violations);

  for (const auto& w : dlm.vocab1) {
    if (dlm.vocab2.count(w)) {
      violations.push_back({"vocab-overlap", w, 1.0});
    }
  }

  check_rows(dlm.lm1.model, "lm1", violations);
  check_rows(dlm.lm2.model, "lm2", violations);
  return violations;
}

namespace {

std::optional<Smoothing> parse_smoothing(std::string_view name) {
  if (name == "mle") return Smoothing::kMLE;
  if (name == "gt") return Smoothing::kGoodTuring;
  if (name == "kn") return Smoothing::kKneserNey;
  if (name == "unspecified") return Smoothing::kUnspecified;
  return std::nullopt;
}

}  // namespace

void save_dlm(const DualLM& dlm, const std::string& dir,
              const DlmManifest& manifest) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir + ": " + ec.message());

  // 12 digits: loaded rows must still normalize within the 1e-9 validation
  // tolerance, which 7-digit interchange precision cannot guarantee.
  write_arpa_file(dlm.lm1.model, (fs::path(dir) / "lm1.arpa").string(), 12);
  write_arpa_file(dlm.lm2.model, (fs::path(dir) / "lm2.arpa").string(), 12);

  std::ostringstream mf;
  mf << "format=dlm-dir-v1\n";
  mf << "lang1=" << manifest.lang1 << "\n";
  mf << "lang2=" << manifest.lang2 << "\n";
  mf << "enforced=" << (manifest.enforced ? "true" : "false") << "\n";
  mf << "enforcement=" << manifest.enforcement << "\n";
  mf << "oov_policy=" << manifest.oov_policy << "\n";
  mf << "smoothing=" << manifest.smoothing << "\n";
  mf << "seed=" << manifest.seed << "\n";
  mf << "tool_version=" << manifest.tool_version << "\n";
  write_file((fs::path(dir) / "manifest").string(), mf.str());
}

DualLM load_dlm(const std::string& dir, DlmManifest* manifest_out) {
  namespace fs = std::filesystem;
  const std::string manifest_path = (fs::path(dir) / "manifest").string();
  std::ifstream mf(manifest_path);
  if (!mf) throw Error("cannot open manifest: " + manifest_path);

  DlmManifest manifest;
  std::string line;
  std::map<std::string, std::string> kv;
  while (std::getline(mf, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (kv["format"] != "dlm-dir-v1") {
    throw Error(manifest_path + ": unsupported or missing format key");
  }
  if (kv.count("lang1")) manifest.lang1 = kv["lang1"];
  if (kv.count("lang2")) manifest.lang2 = kv["lang2"];
  manifest.enforced = kv["enforced"] == "true";
  if (kv.count("enforcement")) manifest.enforcement = kv["enforcement"];
  if (kv.count("oov_policy")) manifest.oov_policy = kv["oov_policy"];
  if (kv.count("smoothing")) manifest.smoothing = kv["smoothing"];
  if (kv.count("seed")) {
    manifest.seed = std::strtoull(kv["seed"].c_str(), nullptr, 10);
  }
  if (kv.count("tool_version")) manifest.tool_version = kv["tool_version"];

  BackoffBigramModel m1 = read_arpa_file((fs::path(dir) / "lm1.arpa").string());
  BackoffBigramModel m2 = read_arpa_file((fs::path(dir) / "lm2.arpa").string());
  if (auto s = parse_smoothing(manifest.smoothing)) {
    m1.smoothing = *s;
    m2.smoothing = *s;
  }

  DualLM dlm = assemble_dual(
      MonolingualLM{std::move(m1), LanguageId::L1, manifest.enforced},
      MonolingualLM{std::move(m2), LanguageId::L2, manifest.enforced});
  if (manifest_out) *manifest_out = manifest;
  return dlm;
}

}  // namespace dualm
