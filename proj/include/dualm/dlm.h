// dlm.h
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
//
// \file
// Dual language models: two monolingual backoff bigram models over
// V_i + {<s>, </s>, <sw>} spliced into one combined conditional distribution.
// The four structural constraints --
//   (1) P_i[</s>|<s>] = 0
//   (2) P_1[<sw>|<s>] + P_2[<sw>|<s>] = 1
//   (3) P_i[<sw>|<sw>] = 0
//   (4) P_i[</s>|<sw>] = 0
// -- are imposed by proportional reweighting, after which every history row
// of the combined model sums to 1.

#ifndef DUALM_DLM_H_
#define DUALM_DLM_H_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dualm/corpus.h"
#include "dualm/ngram.h"

namespace dualm {

inline constexpr const char* kToolVersion = "0.1.0";

struct MonolingualLM {
  BackoffBigramModel model;
  LanguageId lang = LanguageId::L1;
  bool conditions_enforced = false;
};

struct DualLM {
  MonolingualLM lm1;
  MonolingualLM lm2;
  std::set<std::string> vocab1;  // content vocab of lm1
  std::set<std::string> vocab2;

  std::optional<LanguageId> lang_of(const std::string& surface) const;
  const MonolingualLM& side(LanguageId lang) const {
    return lang == LanguageId::L1 ? lm1 : lm2;
  }
};

// Builds a DualLM from two models without reweighting (vocabularies are
// collected and checked for disjointness). Used by enforce_conditions, the
// synthetic generator, and tests that plant defects deliberately.
DualLM assemble_dual(MonolingualLM lm1, MonolingualLM lm2);

// Reweights both models so conditions (1)-(4) hold: the forbidden <sw>-row
// entries are zeroed and the remainder rescaled to 1; P[</s>|<s>] is zeroed;
// the start-switch masses are jointly rescaled to s_i/(s1+s2) with each
// start row's in-vocabulary mass rescaled to the complement. Idempotent.
DualLM enforce_conditions(BackoffBigramModel lm1, BackoffBigramModel lm2);

// The combined conditional. history is <s> or a vocabulary word; next is a
// vocabulary word or </s>. Cross-language transitions factor through the
// switch token: P_i[<sw>|w] * P_j[w'|<sw>].
double combined_logprob(const DualLM& dlm, const std::string& history,
                        const std::string& next);
double combined_prob(const DualLM& dlm, const std::string& history,
                     const std::string& next);

enum class OovPolicy { kSkip, kClosed };

std::string oov_policy_name(OovPolicy policy);
std::optional<OovPolicy> parse_oov_policy(std::string_view name);

struct Transition {
  enum class Source { kL1, kL2, kSwitchProduct, kPlain };
  std::string history;  // "<s>" for the first transition
  std::string word;     // "</s>" for the last
  double logprob;       // natural log
  Source source;
};

struct ScoreBreakdown {
  double total_logprob = 0.0;            // sum of per_transition logprobs
  std::vector<Transition> per_transition;
  uint64_t token_count = 0;              // scored words + 1 for </s>
  uint64_t oov_skipped = 0;
};

// Chain-rule score of a tagged sentence under the combined model. Under the
// skip policy, OOV target tokens are excluded from the sum and the token
// count; an OOV history backs off to the unigram distribution of its tagged
// language. The closed policy throws on any OOV. A zero-probability
// transition yields total_logprob = -inf with the offending transition in
// the breakdown.
ScoreBreakdown score_sentence(const DualLM& dlm,
                              std::span<const TaggedToken> sentence,
                              OovPolicy policy = OovPolicy::kSkip);

// Same contract against a single (mixed) model over plain token strings.
ScoreBreakdown score_sentence(const BackoffBigramModel& model,
                              std::span<const std::string> sentence,
                              OovPolicy policy = OovPolicy::kSkip);

struct EvalReport {
  std::string model;
  std::string smoothing;
  std::string split;
  double ppl = 0.0;
  uint64_t oov_count = 0;
  uint64_t tokens = 0;

  // key=value lines in fixed order: model, smoothing, split, ppl, oov_count,
  // tokens. ppl printed with 6 fractional digits.
  std::string to_text() const;
};

struct EvalOptions {
  OovPolicy oov = OovPolicy::kSkip;
  std::string model_name = "model";
  std::string smoothing = "unspecified";
  std::string split = "eval";
};

// ppl = exp(-(sum of sentence log-probs) / (sum of token counts)), with
// </s> counted per sentence and <s> never counted. Serial reference.
EvalReport evaluate_perplexity(const DualLM& dlm, const Corpus& corpus,
                               const EvalOptions& opts);
EvalReport evaluate_perplexity(const BackoffBigramModel& model,
                               const Corpus& corpus, const EvalOptions& opts);

// OpenMP kernels: per-sentence scores computed in parallel into an indexed
// buffer, reduced in index order with compensated summation. Bit-identical
// to the serial reference for any thread count.
EvalReport evaluate_perplexity_parallel(const DualLM& dlm,
                                        const Corpus& corpus,
                                        const EvalOptions& opts,
                                        int threads = 0);
EvalReport evaluate_perplexity_parallel(const BackoffBigramModel& model,
                                        const Corpus& corpus,
                                        const EvalOptions& opts,
                                        int threads = 0);

struct SampleResult {
  std::vector<TaggedToken> tokens;
  bool truncated = false;
};

// Ancestral sampling from the combined model with precomputed transition
// tables; candidate order is vocab1 sorted, vocab2 sorted, then </s>.
class DlmSampler {
 public:
  explicit DlmSampler(const DualLM& dlm);
  SampleResult sample(uint64_t seed, std::size_t max_len) const;

 private:
  std::vector<TaggedToken> words_;
  std::vector<std::vector<double>> cumulative_;  // [history][candidate]
  std::vector<double> start_cumulative_;
};

// One-shot convenience; identical draws to DlmSampler for the same seed.
SampleResult sample(const DualLM& dlm, uint64_t seed, std::size_t max_len);

struct MassTable {
  std::vector<double> per_length;  // index L = mass of sentences of length L
  double total = 0.0;              // cumulative through max_len

  double cumulative(std::size_t max_len) const;
};

// Exact probability mass of all sentences of length <= max_len, summed by
// dynamic programming over prefix states. Guarded to |V1|+|V2| <= 12.
MassTable enumerate_mass(const DualLM& dlm, std::size_t max_len);

struct ConditionViolation {
  std::string condition;  // condition1..condition4, row-normalization, ...
  std::string history;
  double residual;
};

// Empty iff conditions (1)-(4) and all row normalizations hold within 1e-9.
std::vector<ConditionViolation> validate(const DualLM& dlm);

// --- persistence: a directory of lm1.arpa, lm2.arpa and a manifest ---

struct DlmManifest {
  std::string lang1 = "L1";
  std::string lang2 = "L2";
  bool enforced = true;
  // The reweighting recipe used when the conditions were imposed.
  std::string enforcement = "proportional-rescale";
  std::string oov_policy = "skip";
  std::string smoothing = "unspecified";
  uint64_t seed = 0;
  std::string tool_version = kToolVersion;
};

void save_dlm(const DualLM& dlm, const std::string& dir,
              const DlmManifest& manifest);
DualLM load_dlm(const std::string& dir, DlmManifest* manifest = nullptr);

}  // namespace dualm

#endif  // DUALM_DLM_H_
