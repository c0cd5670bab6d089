// bench_main.cc
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
// Serial-vs-OpenMP comparison for the three data-parallel kernels: corpus
// generation, bigram counting, and perplexity evaluation. The parallel
// kernels must produce identical results; this reports wall times and the
// agreement check.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "dualm/corpus.h"
#include "dualm/dlm.h"
#include "dualm/ngram.h"
#include "dualm/synth.h"
#include "dualm/util.h"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& fn) {
  auto start = Clock::now();
  fn();
  auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n_sentences = argc > 1 ? std::strtoull(argv[1], nullptr, 10)
                                     : 200000;
  uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20240412;

#ifdef _OPENMP
  int threads = omp_get_max_threads();
#else
  int threads = 1;
#endif
  std::printf("sentences=%zu seed=%llu threads=%d\n", n_sentences,
              static_cast<unsigned long long>(seed), threads);

  dualm::GroundTruthSpec spec;
  spec.vocab1_size = 60;
  spec.vocab2_size = 50;
  spec.seed = seed;
  auto truth = dualm::make_ground_truth(spec);

  // Warm allocator arenas and page tables at full size so the timings
  // reflect steady state rather than first-touch faults.
  {
    auto warm = dualm::generate_corpus_parallel(truth, n_sentences, seed, 0);
  }
  {
    auto warm = dualm::generate_corpus(truth, n_sentences, seed, 0);
  }

  dualm::Corpus serial_corpus, parallel_corpus;
  double t_gen_serial = time_ms([&] {
    serial_corpus = dualm::generate_corpus(truth, n_sentences, seed, 0);
  });
  double t_gen_parallel = time_ms([&] {
    parallel_corpus =
        dualm::generate_corpus_parallel(truth, n_sentences, seed, 0);
  });
  bool gen_equal = serial_corpus.utterances == parallel_corpus.utterances;
  std::printf("generate   serial %8.1f ms   parallel %8.1f ms   x%.2f   %s\n",
              t_gen_serial, t_gen_parallel, t_gen_serial / t_gen_parallel,
              gen_equal ? "identical" : "MISMATCH");

  auto sentences = dualm::surface_sentences(serial_corpus);
  dualm::CountTable serial_counts, parallel_counts;
  double t_count_serial =
      time_ms([&] { serial_counts = dualm::count_corpus(sentences); });
  double t_count_parallel = time_ms(
      [&] { parallel_counts = dualm::count_corpus_parallel(sentences); });
  bool count_equal = serial_counts.unigram == parallel_counts.unigram &&
                     serial_counts.bigram == parallel_counts.bigram;
  std::printf("count      serial %8.1f ms   parallel %8.1f ms   x%.2f   %s\n",
              t_count_serial, t_count_parallel,
              t_count_serial / t_count_parallel,
              count_equal ? "identical" : "MISMATCH");

  auto d1 = dualm::derive_monolingual(serial_corpus, dualm::LanguageId::L1);
  auto d2 = dualm::derive_monolingual(serial_corpus, dualm::LanguageId::L2);
  auto dlm = dualm::enforce_conditions(
      dualm::estimate_kneser_ney(dualm::count_corpus_parallel(d1.sentences)),
      dualm::estimate_kneser_ney(dualm::count_corpus_parallel(d2.sentences)));

  dualm::EvalOptions opts;
  dualm::EvalReport serial_report, parallel_report;
  double t_ppl_serial = time_ms([&] {
    serial_report = dualm::evaluate_perplexity(dlm, serial_corpus, opts);
  });
  double t_ppl_parallel = time_ms([&] {
    parallel_report =
        dualm::evaluate_perplexity_parallel(dlm, serial_corpus, opts);
  });
  bool ppl_equal = serial_report.ppl == parallel_report.ppl;
  std::printf("perplexity serial %8.1f ms   parallel %8.1f ms   x%.2f   %s\n",
              t_ppl_serial, t_ppl_parallel, t_ppl_serial / t_ppl_parallel,
              ppl_equal ? "identical" : "MISMATCH");
  std::printf("ppl=%s tokens=%llu\n",
              dualm::format_fixed(serial_report.ppl, 6).c_str(),
              static_cast<unsigned long long>(serial_report.tokens));

  return gen_equal && count_equal && ppl_equal ? 0 : 1;
}
