// analysis.h
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
// Corpus diagnostics: switch-boundary bigram statistics, cumulative
// frequency-vs-fraction histograms on a log2 axis, and per-sentence
// perplexity comparison between a mixed model and a DLM.

#ifndef DUALM_ANALYSIS_H_
#define DUALM_ANALYSIS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dualm/corpus.h"
#include "dualm/dlm.h"
#include "dualm/ngram.h"

namespace dualm {

struct SwitchStats {
  uint64_t total_types = 0;              // distinct cross-language bigrams
  uint64_t total_occurrences = 0;
  std::map<uint64_t, uint64_t> histogram;        // count -> number of types
  std::map<uint64_t, double> fraction_count_le;  // threshold 1..10 -> fraction
  double fraction_singleton = 0.0;
  bool defined = false;  // false when the corpus has no switch boundaries

  std::string to_text() const;  // key=value lines, stable order
};

// A switch bigram is an adjacent token pair with differing language tags;
// statistics are over bigram types.
SwitchStats switch_bigram_stats(const Corpus& corpus);

struct FreqFractionHistogram {
  int order = 1;  // 1 or 3
  // bucket b covers types with frequency <= 2^b (f = 1 sits in bucket 1);
  // values are the cumulative fraction of corpus tokens covered.
  std::map<int, double> buckets;

  std::string to_tsv() const;  // header "bucket<TAB>cumulative_fraction"
};

// Cumulative fraction of n-gram token occurrences by ceil(log2 f) bucket.
// order 1 counts tokens; order 3 counts within-sentence trigrams (sentences
// shorter than 3 contribute nothing). Throws for other orders or when no
// n-grams exist.
FreqFractionHistogram freq_fraction_histogram(
    const std::vector<std::vector<std::string>>& sentences, int order);

struct SentencePpl {
  std::string sentence;  // space-joined surfaces
  double mixed_ppl;
  double dlm_ppl;
};

// Per-sentence perplexities under both models, in input order, using the
// words-plus-</s> token convention.
std::vector<SentencePpl> compare_sentence_ppl(const BackoffBigramModel& mixed,
                                              const DualLM& dlm,
                                              const Corpus& corpus,
                                              OovPolicy policy);

// TSV with header: sentence, mixed_ppl, dlm_ppl (6 fractional digits).
void write_comparison_tsv(const std::vector<SentencePpl>& rows,
                          std::ostream& out);

}  // namespace dualm

#endif  // DUALM_ANALYSIS_H_
