// synth.cc
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

#include "dualm/synth.h"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>

#include "dualm/random.h"
#include "dualm/util.h"

namespace dualm {

GroundTruthSpec sparse_switch_preset(uint64_t seed) {
  GroundTruthSpec spec;
  spec.vocab1_size = 70;
  spec.vocab2_size = 70;
  spec.switch_rate_low = 0.04;
  spec.switch_rate_high = 0.10;
  spec.eos_rate_low = 0.08;
  spec.eos_rate_high = 0.16;
  spec.start_balance = 0.5;
  spec.concentration = 0.2;  // skewed rows: most switch bigrams stay rare
  spec.seed = seed;
  return spec;
}

namespace {

std::vector<std::string> make_words(const char* prefix, std::size_t n) {
  std::vector<std::string> words;
  words.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    words.push_back(prefix + std::to_string(i));
  }
  return words;
}

// One monolingual model with full-support explicit rows over
// V + {<sw>, </s>}; conditions (3), (4) hold by construction and the <s>
// row carries exactly start_switch mass on <sw> and zero on </s>.
BackoffBigramModel build_side(const std::vector<std::string>& vocab,
                              double start_switch,
                              const GroundTruthSpec& spec, Rng& rng) {
  BackoffBigramModel model;
  model.smoothing = Smoothing::kMLE;
  const std::size_t k = vocab.size();

  auto fill_row = [&](const std::string& history,
                      const std::vector<double>& probs,
                      const std::vector<std::string>& targets) {
    auto& row = model.rows[history];
    for (std::size_t i = 0; i < targets.size(); ++i) {
      row[targets[i]] = probs[i] > 0.0 ? std::log(probs[i]) : kNegInf;
    }
    model.backoff[history] = kNegInf;
  };

  // <s>: start_switch on <sw>, the rest over the vocabulary.
  {
    auto weights = rng.dirichlet(spec.concentration, k);
    std::vector<double> probs;
    std::vector<std::string> targets;
    for (std::size_t i = 0; i < k; ++i) {
      probs.push_back((1.0 - start_switch) * weights[i]);
      targets.push_back(vocab[i]);
    }
    probs.push_back(start_switch);
    targets.emplace_back(kSwitch);
    fill_row(kSentStart, probs, targets);
  }

  // Word histories: switch mass, then eos mass, then the vocabulary.
  for (const auto& w : vocab) {
    double switch_rate = spec.switch_rate_low +
                         (spec.switch_rate_high - spec.switch_rate_low) *
                             rng.uniform();
    double eos_rate =
        spec.eos_rate_low +
        (spec.eos_rate_high - spec.eos_rate_low) * rng.uniform();
    auto weights = rng.dirichlet(spec.concentration, k);
    std::vector<double> probs;
    std::vector<std::string> targets;
    double rest = 1.0 - switch_rate - eos_rate;
    for (std::size_t i = 0; i < k; ++i) {
      probs.push_back(rest * weights[i]);
      targets.push_back(vocab[i]);
    }
    probs.push_back(switch_rate);
    targets.emplace_back(kSwitch);
    probs.push_back(eos_rate);
    targets.emplace_back(kSentEnd);
    fill_row(w, probs, targets);
  }

  // <sw>: vocabulary only (conditions (3) and (4)).
  {
    auto weights = rng.dirichlet(spec.concentration, k);
    std::vector<double> probs;
    std::vector<std::string> targets;
    for (std::size_t i = 0; i < k; ++i) {
      probs.push_back(weights[i]);
      targets.push_back(vocab[i]);
    }
    fill_row(kSwitch, probs, targets);
  }

  // Implied unigram distribution: uniform mixture of the history rows.
  {
    std::map<std::string, double> acc;
    for (const auto& [h, row] : model.rows) {
      for (const auto& [w, lp] : row) {
        if (lp != kNegInf) acc[w] += std::exp(lp);
      }
    }
    double total = 0.0;
    for (const auto& [w, p] : acc) total += p;
    for (const auto& [w, p] : acc) model.unigram[w] = std::log(p / total);
  }
  return model;
}

}  // namespace

DualLM make_ground_truth(const GroundTruthSpec& spec) {
  if (spec.vocab1_size == 0 || spec.vocab2_size == 0) {
    throw Error("make_ground_truth: vocabulary sizes must be positive");
  }
  if (spec.start_balance <= 0.0 || spec.start_balance >= 1.0) {
    throw Error("make_ground_truth: start_balance must lie in (0,1)");
  }
  if (spec.switch_rate_low <= 0.0 ||
      spec.switch_rate_high < spec.switch_rate_low ||
      spec.switch_rate_high + spec.eos_rate_high >= 1.0 ||
      spec.eos_rate_low <= 0.0 || spec.eos_rate_high < spec.eos_rate_low) {
    throw Error("make_ground_truth: invalid rate ranges");
  }
  if (spec.concentration <= 0.0) {
    throw Error("make_ground_truth: concentration must be positive");
  }

  Rng rng(spec.seed);
  auto v1 = make_words("a", spec.vocab1_size);
  auto v2 = make_words("b", spec.vocab2_size);
  BackoffBigramModel m1 = build_side(v1, spec.start_balance, spec, rng);
  BackoffBigramModel m2 = build_side(v2, 1.0 - spec.start_balance, spec, rng);

  DualLM dlm = assemble_dual(
      MonolingualLM{std::move(m1), LanguageId::L1, true},
      MonolingualLM{std::move(m2), LanguageId::L2, true});
  return dlm;
}

Corpus generate_corpus(const DualLM& dlm, std::size_t n_sentences,
                       uint64_t seed, std::size_t n_speakers,
                       std::size_t max_len) {
  DlmSampler sampler(dlm);
  Corpus corpus;
  for (std::size_t i = 0; i < n_sentences; ++i) {
    SampleResult s = sampler.sample(mix_seed(seed, i), max_len);
    Utterance utt;
    utt.tokens = std::move(s.tokens);
    if (n_speakers > 0) {
      utt.speaker = "spk" + std::to_string(i % n_speakers);
    }
    corpus.add(std::move(utt));
  }
  return corpus;
}

Corpus generate_corpus_parallel(const DualLM& dlm, std::size_t n_sentences,
                                uint64_t seed, std::size_t n_speakers,
                                std::size_t max_len, int threads) {
  DlmSampler sampler(dlm);
  std::vector<Utterance> utts(n_sentences);
#ifdef _OPENMP
  int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nthreads)
  for (std::size_t i = 0; i < n_sentences; ++i) {
    SampleResult s = sampler.sample(mix_seed(seed, i), max_len);
    utts[i].tokens = std::move(s.tokens);
    if (n_speakers > 0) utts[i].speaker = "spk" + std::to_string(i % n_speakers);
  }
#else
  (void)threads;
  for (std::size_t i = 0; i < n_sentences; ++i) {
    SampleResult s = sampler.sample(mix_seed(seed, i), max_len);
    utts[i].tokens = std::move(s.tokens);
    if (n_speakers > 0) utts[i].speaker = "spk" + std::to_string(i % n_speakers);
  }
#endif
  Corpus corpus;
  for (auto& utt : utts) corpus.add(std::move(utt));
  return corpus;
}

}  // namespace dualm
