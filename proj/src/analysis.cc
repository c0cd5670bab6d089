// analysis.cc
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

#include "dualm/analysis.h"

#include <cmath>
#include <sstream>

#include "dualm/util.h"

namespace dualm {

std::string SwitchStats::to_text() const {
  std::ostringstream out;
  out << "total_types=" << total_types << "\n";
  out << "total_occurrences=" << total_occurrences << "\n";
  if (!defined) return out.str();
  out << "fraction_singleton=" << format_fixed(fraction_singleton, 6) << "\n";
  for (const auto& [threshold, fraction] : fraction_count_le) {
    out << "fraction_count_le_" << threshold << "="
        << format_fixed(fraction, 6) << "\n";
  }
  for (const auto& [count, types] : histogram) {
    out << "types_with_count_" << count << "=" << types << "\n";
  }
  return out.str();
}

SwitchStats switch_bigram_stats(const Corpus& corpus) {
  std::map<std::pair<std::string, std::string>, uint64_t> switch_bigrams;
  uint64_t occurrences = 0;
  for (const auto& utt : corpus.utterances) {
    for (std::size_t i = 0; i + 1 < utt.tokens.size(); ++i) {
      const auto& a = utt.tokens[i];
      const auto& b = utt.tokens[i + 1];
      if (a.lang != b.lang) {
        ++switch_bigrams[{a.surface, b.surface}];
        ++occurrences;
      }
    }
  }

  SwitchStats stats;
  stats.total_types = switch_bigrams.size();
  stats.total_occurrences = occurrences;
  if (switch_bigrams.empty()) return stats;  // fractions reported as absent

  stats.defined = true;
  for (const auto& [bigram, count] : switch_bigrams) {
    ++stats.histogram[count];
  }
  uint64_t singletons = 0;
  if (auto it = stats.histogram.find(1); it != stats.histogram.end()) {
    singletons = it->second;
  }
  stats.fraction_singleton =
      static_cast<double>(singletons) / static_cast<double>(stats.total_types);
  for (uint64_t threshold = 1; threshold <= 10; ++threshold) {
    uint64_t covered = 0;
    for (const auto& [count, types] : stats.histogram) {
      if (count <= threshold) covered += types;
    }
    stats.fraction_count_le[threshold] =
        static_cast<double>(covered) / static_cast<double>(stats.total_types);
  }
  return stats;
}

std::string FreqFractionHistogram::to_tsv() const {
  // The column name records the cumulative reading: bucket b covers token
  // mass of all types with frequency <= 2^b.
  std::ostringstream out;
  out << "bucket\tcumulative_fraction\n";
  for (const auto& [bucket, fraction] : buckets) {
    out << bucket << '\t' << format_fixed(fraction, 6) << '\n';
  }
  return out.str();
}

FreqFractionHistogram freq_fraction_histogram(
    const std::vector<std::vector<std::string>>& sentences, int order) {
  if (order != 1 && order != 3) {
    throw Error("freq_fraction_histogram: order must be 1 or 3");
  }
  std::map<std::string, uint64_t> freq;
  uint64_t total = 0;
  for (const auto& sent : sentences) {
    if (order == 1) {
      for (const auto& w : sent) {
        ++freq[w];
        ++total;
      }
    } else {
      for (std::size_t i = 0; i + 2 < sent.size(); ++i) {
        ++freq[sent[i] + " " + sent[i + 1] + " " + sent[i + 2]];
        ++total;
      }
    }
  }
  if (total == 0) {
    throw Error("freq_fraction_histogram: corpus has no n-grams of order " +
                std::to_string(order));
  }

  // bucket(f) = ceil(log2 f), with f = 1 in bucket 1.
  std::map<int, uint64_t> bucket_tokens;
  int max_bucket = 1;
  for (const auto& [type, f] : freq) {
    int bucket = 1;
    while ((1ull << bucket) < f) ++bucket;
    bucket_tokens[bucket] += f;
    max_bucket = std::max(max_bucket, bucket);
  }

  FreqFractionHistogram hist;
  hist.order = order;
  uint64_t covered = 0;
  for (int b = 1; b <= max_bucket; ++b) {
    if (auto it = bucket_tokens.find(b); it != bucket_tokens.end()) {
      covered += it->second;
    }
    hist.buckets[b] = static_cast<double>(covered) / static_cast<double>(total);
  }
  return hist;
}

std::vector<SentencePpl> compare_sentence_ppl(const BackoffBigramModel& mixed,
                                              const DualLM& dlm,
                                              const Corpus& corpus,
                                              OovPolicy policy) {
  std::vector<SentencePpl> rows;
  rows.reserve(corpus.utterances.size());
  for (const auto& utt : corpus.utterances) {
    std::vector<std::string> surfaces;
    surfaces.reserve(utt.tokens.size());
    for (const auto& t : utt.tokens) surfaces.push_back(t.surface);

    ScoreBreakdown mb = score_sentence(mixed, surfaces, policy);
    ScoreBreakdown db = score_sentence(dlm, utt.tokens, policy);
    auto ppl = [](const ScoreBreakdown& b) {
      return b.total_logprob == kNegInf
                 ? kPosInf
                 : std::exp(-b.total_logprob /
                            static_cast<double>(b.token_count));
    };

    std::string joined;
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
      if (i) joined += ' ';
      joined += surfaces[i];
    }
    rows.push_back(SentencePpl{std::move(joined), ppl(mb), ppl(db)});
  }
  return rows;
}

void write_comparison_tsv(const std::vector<SentencePpl>& rows,
                          std::ostream& out) {
  out << "sentence\tmixed_ppl\tdlm_ppl\n";
  for (const auto& row : rows) {
    out << row.sentence << '\t' << format_fixed(row.mixed_ppl, 6) << '\t'
        << format_fixed(row.dlm_ppl, 6) << '\n';
  }
}

}  // namespace dualm
