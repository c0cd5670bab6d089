// ngram.cc
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

#include "dualm/ngram.h"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>

#include "dualm/corpus.h"
#include "dualm/util.h"

namespace dualm {

void CountTable::add_sentence(std::span<const std::string> sentence) {
  if (sentence.empty()) throw Error("cannot count an empty sentence");
  std::string prev = kSentStart;
  for (const auto& w : sentence) {
    ++unigram[w];
    ++bigram[prev][w];
    prev = w;
  }
  ++unigram[kSentEnd];
  ++bigram[prev][kSentEnd];
  total_tokens += sentence.size() + 1;
  ++sentences;
}

void CountTable::merge(const CountTable& other) {
  for (const auto& [w, c] : other.unigram) unigram[w] += c;
  for (const auto& [h, row] : other.bigram) {
    auto& mine = bigram[h];
    for (const auto& [w, c] : row) mine[w] += c;
  }
  total_tokens += other.total_tokens;
  sentences += other.sentences;
}

std::map<uint64_t, uint64_t> CountTable::count_of_counts(int order) const {
  std::map<uint64_t, uint64_t> coc;
  if (order == 1) {
    for (const auto& [w, c] : unigram) ++coc[c];
  } else if (order == 2) {
    for (const auto& [h, row] : bigram) {
      for (const auto& [w, c] : row) ++coc[c];
    }
  } else {
    throw Error("count_of_counts: order must be 1 or 2");
  }
  return coc;
}

uint64_t CountTable::history_total(const std::string& history) const {
  auto it = bigram.find(history);
  if (it == bigram.end()) return 0;
  uint64_t total = 0;
  for (const auto& [w, c] : it->second) total += c;
  return total;
}

uint64_t CountTable::bigram_types() const {
  uint64_t n = 0;
  for (const auto& [h, row] : bigram) n += row.size();
  return n;
}

CountTable count_corpus(const std::vector<std::vector<std::string>>& sentences) {
  CountTable table;
  for (const auto& sent : sentences) table.add_sentence(sent);
  return table;
}

CountTable count_corpus_parallel(
    const std::vector<std::vector<std::string>>& sentences, int threads) {
#ifdef _OPENMP
  int nthreads = threads > 0 ? threads : omp_get_max_threads();
  nthreads = std::max(1, std::min<int>(nthreads, 64));
  std::vector<CountTable> shards(nthreads);
  const std::size_t n = sentences.size();
#pragma omp parallel num_threads(nthreads)
  {
    int t = omp_get_thread_num();
    std::size_t lo = n * static_cast<std::size_t>(t) / nthreads;
    std::size_t hi = n * static_cast<std::size_t>(t + 1) / nthreads;
    for (std::size_t i = lo; i < hi; ++i) {
      shards[t].add_sentence(sentences[i]);
    }
  }
  CountTable table;
  for (const auto& shard : shards) table.merge(shard);
  return table;
#else
  (void)threads;
  return count_corpus(sentences);
#endif
}

std::string smoothing_name(Smoothing s) {
  switch (s) {
    case Smoothing::kMLE: return "mle";
    case Smoothing::kGoodTuring: return "gt";
    case Smoothing::kKneserNey: return "kn";
    case Smoothing::kUnspecified: return "unspecified";
  }
  return "unspecified";
}

double BackoffBigramModel::cond_logprob(const std::string& history,
                                        const std::string& word) const {
  if (history == kSentEnd) {
    throw Error("conditional undefined for history </s>");
  }
  auto rit = rows.find(history);
  if (rit == rows.end()) {
    throw Error("unknown history \"" + history + "\"");
  }
  auto wit = rit->second.find(word);
  if (wit != rit->second.end()) return wit->second;
  auto bit = backoff.find(history);
  double alpha = bit == backoff.end() ? kNegInf : bit->second;
  if (alpha == kNegInf) return kNegInf;
  double uni = unigram_logprob(word);
  if (uni == kNegInf) return kNegInf;
  return alpha + uni;
}

double BackoffBigramModel::unigram_logprob(const std::string& word) const {
  auto it = unigram.find(word);
  return it == unigram.end() ? kNegInf : it->second;
}

std::set<std::string> BackoffBigramModel::vocab() const {
  std::set<std::string> v;
  for (const auto& [w, lp] : unigram) v.insert(w);
  for (const auto& [h, row] : rows) {
    if (h != kSentStart) v.insert(h);
  }
  return v;
}

std::set<std::string> BackoffBigramModel::content_vocab() const {
  auto v = vocab();
  v.erase(kSentStart);
  v.erase(kSentEnd);
  v.erase(kSwitch);
  return v;
}

bool BackoffBigramModel::has_history(const std::string& history) const {
  return rows.count(history) > 0;
}

std::vector<std::string> BackoffBigramModel::target_words() const {
  auto v = vocab();
  v.erase(kSentStart);
  v.insert(kSentEnd);
  return {v.begin(), v.end()};
}

BackoffBigramModel estimate_mle(const CountTable& counts) {
  if (counts.bigram.empty()) throw Error("estimate_mle: empty counts");
  BackoffBigramModel model;
  model.smoothing = Smoothing::kMLE;
  for (const auto& [h, row] : counts.bigram) {
    uint64_t total = 0;
    for (const auto& [w, c] : row) total += c;
    auto& out = model.rows[h];
    for (const auto& [w, c] : row) {
      out[w] = std::log(static_cast<double>(c) / static_cast<double>(total));
    }
    model.backoff[h] = kNegInf;  // unseen events have probability zero
  }
  for (const auto& [w, c] : counts.unigram) {
    model.unigram[w] = std::log(static_cast<double>(c) /
                                static_cast<double>(counts.total_tokens));
  }
  return model;
}

namespace {

// Least-squares fit of log N_c = a + b log c over the nonzero entries.
// Returns false when fewer than two distinct points exist.
bool fit_loglog(const std::map<uint64_t, uint64_t>& coc, double* a,
                double* b) {
  std::vector<double> xs, ys;
  for (const auto& [c, n] : coc) {
    if (n == 0) continue;
    xs.push_back(std::log(static_cast<double>(c)));
    ys.push_back(std::log(static_cast<double>(n)));
  }
  if (xs.size() < 2) return false;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0) return false;
  *b = sxy / sxx;
  *a = my - *b * mx;
  return true;
}

// Good-Turing discount ratios d_c for 1 <= c < cutoff. Gaps in the
// count-of-counts are filled from the regression line; a ratio outside
// (0, 1] means the statistics are unusable at that count, and the count is
// left undiscounted.
std::map<uint64_t, double> gt_discounts(
    const std::map<uint64_t, uint64_t>& coc, int cutoff) {
  double a = 0, b = 0;
  bool have_fit = fit_loglog(coc, &a, &b);
  auto smoothed = [&](uint64_t c) -> double {
    auto it = coc.find(c);
    if (it != coc.end() && it->second > 0) {
      return static_cast<double>(it->second);
    }
    if (!have_fit) return 0.0;
    return std::exp(a + b * std::log(static_cast<double>(c)));
  };

  double n1 = smoothed(1);
  double nk1 = smoothed(static_cast<uint64_t>(cutoff) + 1);
  double big_a = n1 > 0 ? (cutoff + 1) * nk1 / n1 : 0.0;
  if (big_a >= 1.0) big_a = 0.0;

  std::map<uint64_t, double> d;
  for (uint64_t c = 1; c < static_cast<uint64_t>(cutoff); ++c) {
    double nc = smoothed(c);
    double ncn = smoothed(c + 1);
    if (nc <= 0.0 || ncn <= 0.0) {
      d[c] = 1.0;
      continue;
    }
    double cstar = static_cast<double>(c + 1) * ncn / nc;
    double dc = (cstar / static_cast<double>(c) - big_a) / (1.0 - big_a);
    if (!(dc > 0.0) || dc > 1.0) dc = 1.0;
    d[c] = dc;
  }
  return d;
}

}  // namespace

BackoffBigramModel estimate_good_turing(const CountTable& counts,
                                        const GoodTuringOptions& opts,
                                        std::vector<std::string>* warnings) {
  if (counts.bigram.empty()) {
    throw Error("estimate_good_turing: need at least one bigram");
  }
  const uint64_t k = static_cast<uint64_t>(opts.cutoff);

  BackoffBigramModel model;
  model.smoothing = Smoothing::kGoodTuring;

  // Unigram distribution: discount, then renormalize over the closed vocab.
  auto coc1 = counts.count_of_counts(1);
  std::map<std::string, double> puni;
  if (coc1.count(1) == 0) {
    if (warnings) {
      warnings->push_back(
          "good-turing: no singleton unigrams; unigram order falls back to "
          "MLE");
    }
    for (const auto& [w, c] : counts.unigram) {
      puni[w] = static_cast<double>(c) /
                static_cast<double>(counts.total_tokens);
    }
  } else {
    auto d1 = gt_discounts(coc1, opts.cutoff);
    double z = 0.0;
    for (const auto& [w, c] : counts.unigram) {
      double dd = c < k ? d1.at(c) : 1.0;
      double m = dd * static_cast<double>(c);
      puni[w] = m;
      z += m;
    }
    for (auto& [w, m] : puni) m /= z;
  }

  // Bigram rows: Katz-discounted explicit entries plus a backoff weight
  // sized so each row sums to 1 against the unigram distribution.
  auto coc2 = counts.count_of_counts(2);
  std::map<uint64_t, double> d2;
  if (coc2.count(1) == 0) {
    if (warnings) {
      warnings->push_back(
          "good-turing: no singleton bigrams; bigram order falls back to "
          "MLE");
    }
    for (uint64_t c = 1; c < k; ++c) d2[c] = 1.0;
  } else {
    d2 = gt_discounts(coc2, opts.cutoff);
  }

  for (const auto& [h, row] : counts.bigram) {
    uint64_t total = 0;
    for (const auto& [w, c] : row) total += c;
    double explicit_mass = 0.0;
    double seen_uni = 0.0;
    std::map<std::string, double> probs;
    for (const auto& [w, c] : row) {
      double dd = c < k ? d2.at(c) : 1.0;
      double p = dd * static_cast<double>(c) / static_cast<double>(total);
      probs[w] = p;
      explicit_mass += p;
      seen_uni += puni.at(w);
    }
    double beta = 1.0 - explicit_mass;
    double unseen_uni = 1.0 - seen_uni;
    double alpha;
    if (beta <= 1e-15) {
      alpha = 0.0;
    } else if (unseen_uni <= 1e-15) {
      // Every word is already explicit in this row; give the leftover mass
      // back to the row proportionally.
      for (auto& [w, p] : probs) p /= explicit_mass;
      alpha = 0.0;
    } else {
      alpha = beta / unseen_uni;
    }
    auto& out = model.rows[h];
    for (const auto& [w, p] : probs) out[w] = std::log(p);
    model.backoff[h] = alpha > 0.0 ? std::log(alpha) : kNegInf;
  }

  for (const auto& [w, p] : puni) model.unigram[w] = std::log(p);
  return model;
}

BackoffBigramModel estimate_kneser_ney(const CountTable& counts) {
  if (counts.bigram.empty()) {
    throw Error("estimate_kneser_ney: need at least one bigram");
  }
  uint64_t n1 = 0, n2 = 0;
  for (const auto& [h, row] : counts.bigram) {
    for (const auto& [w, c] : row) {
      if (c == 1) ++n1;
      if (c == 2) ++n2;
    }
  }
  if (n1 + 2 * n2 == 0) {
    throw Error(
        "estimate_kneser_ney: discount undefined (no bigram types with "
        "count 1 or 2); use MLE for this corpus");
  }
  const double discount =
      static_cast<double>(n1) / (static_cast<double>(n1) + 2.0 * static_cast<double>(n2));

  // Continuation counts: distinct histories per predicted word.
  std::map<std::string, uint64_t> continuation;
  uint64_t total_types = 0;
  for (const auto& [h, row] : counts.bigram) {
    for (const auto& [w, c] : row) {
      ++continuation[w];
      ++total_types;
    }
  }
  std::map<std::string, double> pcont;
  for (const auto& [w, n] : continuation) {
    pcont[w] = static_cast<double>(n) / static_cast<double>(total_types);
  }

  BackoffBigramModel model;
  model.smoothing = Smoothing::kKneserNey;
  for (const auto& [h, row] : counts.bigram) {
    uint64_t total = 0;
    for (const auto& [w, c] : row) total += c;
    double lambda = discount * static_cast<double>(row.size()) /
                    static_cast<double>(total);
    auto& out = model.rows[h];
    for (const auto& [w, c] : row) {
      double p = std::max(static_cast<double>(c) - discount, 0.0) /
                     static_cast<double>(total) +
                 lambda * pcont.at(w);
      out[w] = std::log(p);
    }
    model.backoff[h] = lambda > 0.0 ? std::log(lambda) : kNegInf;
  }
  for (const auto& [w, p] : pcont) model.unigram[w] = std::log(p);
  return model;
}

}  // namespace dualm
