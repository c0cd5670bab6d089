// synth.h
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
// Synthetic code-switched corpora drawn from parameterized ground-truth
// dual models, so estimator and perplexity experiments run without any
// licensed data.

#ifndef DUALM_SYNTH_H_
#define DUALM_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dualm/corpus.h"
#include "dualm/dlm.h"

namespace dualm {

struct GroundTruthSpec {
  std::size_t vocab1_size = 20;
  std::size_t vocab2_size = 20;
  // Per-history switch mass is drawn uniformly from this range.
  double switch_rate_low = 0.05;
  double switch_rate_high = 0.15;
  // Per-history end-of-sentence mass range; controls expected length.
  double eos_rate_low = 0.08;
  double eos_rate_high = 0.18;
  // s1 = P1[<sw>|<s>]: the probability that the first token is L2.
  double start_balance = 0.5;
  // Dirichlet concentration shaping per-history distributions; smaller
  // values give sparser, more skewed rows.
  double concentration = 0.5;
  uint64_t seed = 0;
};

// Low switch rate over a largish vocabulary: switch-boundary bigrams come
// out mostly as singletons, the regime where pooled switch statistics pay
// off. Used by the trend experiments.
GroundTruthSpec sparse_switch_preset(uint64_t seed);

// Random per-history distributions satisfying conditions (1)-(4) by
// construction; validate() on the result is empty. Deterministic per spec.
DualLM make_ground_truth(const GroundTruthSpec& spec);

// n sentences via the module sampler with per-index derived seeds. Tokens
// carry correct language tags by construction. If n_speakers > 0, speakers
// s000.. are assigned round-robin. Serial reference.
Corpus generate_corpus(const DualLM& dlm, std::size_t n_sentences,
                       uint64_t seed, std::size_t n_speakers = 0,
                       std::size_t max_len = 100);

// OpenMP kernel partitioned by sentence index; per-index seeds make it
// bit-identical to the serial reference for any thread count.
Corpus generate_corpus_parallel(const DualLM& dlm, std::size_t n_sentences,
                                uint64_t seed, std::size_t n_speakers = 0,
                                std::size_t max_len = 100, int threads = 0);

}  // namespace dualm

#endif  // DUALM_SYNTH_H_
