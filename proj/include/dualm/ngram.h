// ngram.h
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
// Bigram counting and smoothed backoff bigram estimation.
//
// Counting is a sequential fold per shard; CountTable::merge is associative,
// which is what makes the OpenMP counting kernel below exact. The serial
// count_corpus is the reference implementation and is kept for tests and the
// benchmark.

#ifndef DUALM_NGRAM_H_
#define DUALM_NGRAM_H_

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace dualm {

struct CountTable {
  // Prediction-target unigram counts: w1..wn </s> per sentence, <s> excluded.
  std::map<std::string, uint64_t> unigram;
  // bigram[h][w] over the <s>-padded sentence.
  std::map<std::string, std::map<std::string, uint64_t>> bigram;
  uint64_t total_tokens = 0;  // sum of unigram counts
  uint64_t sentences = 0;

  // Adds "<s> w1..wn </s>" transitions. Throws on an empty sentence.
  void add_sentence(std::span<const std::string> sentence);

  // Pointwise addition; associative and commutative.
  void merge(const CountTable& other);

  // Count-of-counts N_c for the given order (1 or 2).
  std::map<uint64_t, uint64_t> count_of_counts(int order) const;

  uint64_t history_total(const std::string& history) const;
  uint64_t bigram_types() const;
};

// Serial reference kernel.
CountTable count_corpus(const std::vector<std::vector<std::string>>& sentences);

// OpenMP kernel: contiguous shards counted independently, merged in shard
// order. Produces exactly the same table as count_corpus. threads <= 0 means
// the OpenMP default.
CountTable count_corpus_parallel(
    const std::vector<std::vector<std::string>>& sentences, int threads = 0);

enum class Smoothing { kMLE, kGoodTuring, kKneserNey, kUnspecified };

std::string smoothing_name(Smoothing s);

// Smoothed conditional distribution in backoff form. Log-probabilities are
// natural logs; exact zeros are stored as -inf (ARPA serialization maps them
// to -99 and back). For any history h in the vocabulary (plus <s>, minus
// </s>) the full conditional row sums to 1:
//   P(w|h) = exp(explicit entry)             if (h,w) is stored
//          = exp(backoff(h)) * P_uni(w)      otherwise.
struct BackoffBigramModel {
  std::map<std::string, std::map<std::string, double>> rows;  // explicit logP
  std::map<std::string, double> backoff;       // history -> log alpha
  std::map<std::string, double> unigram;       // word -> logP (no <s>)
  Smoothing smoothing = Smoothing::kUnspecified;

  // Natural-log conditional. Throws on history </s> or a history absent from
  // the model (OOV handling lives in the scoring layer).
  double cond_logprob(const std::string& history,
                      const std::string& word) const;

  // Natural-log unigram probability; -inf for words outside the model.
  double unigram_logprob(const std::string& word) const;

  // All words the model can predict or condition on, markers included.
  std::set<std::string> vocab() const;

  // vocab() minus <s>, </s>, <sw>.
  std::set<std::string> content_vocab() const;

  bool has_history(const std::string& history) const;

  // Prediction targets: vocab() minus <s>, plus </s>.
  std::vector<std::string> target_words() const;
};

BackoffBigramModel estimate_mle(const CountTable& counts);

struct GoodTuringOptions {
  int cutoff = 7;  // counts >= cutoff are kept undiscounted
};

// Katz backoff with Good-Turing discounts. Count-of-count gaps are repaired
// by a log-log regression fit before the discount formula is applied; an
// order with no singletons falls back to MLE and reports a warning.
BackoffBigramModel estimate_good_turing(
    const CountTable& counts, const GoodTuringOptions& opts = {},
    std::vector<std::string>* warnings = nullptr);

// Interpolated Kneser-Ney with a single discount D = n1/(n1+2*n2), stored in
// backoff form. Throws if n1 = n2 = 0 (D undefined; use MLE instead).
BackoffBigramModel estimate_kneser_ney(const CountTable& counts);

}  // namespace dualm

#endif  // DUALM_NGRAM_H_
