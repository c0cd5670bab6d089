// Serial reference vs OpenMP kernel agreement. The parallel kernels must be
// bit-identical to their serial references for any thread count.

#include <cmath>

#include "doctest.h"
#include "dualm/corpus.h"
#include "dualm/dlm.h"
#include "dualm/ngram.h"
#include "dualm/random.h"
#include "dualm/synth.h"
#include "dualm/util.h"
#include "test_support.h"

using namespace dualm;

namespace {

GroundTruthSpec bench_spec(uint64_t seed) {
  GroundTruthSpec spec;
  spec.vocab1_size = 15;
  spec.vocab2_size = 12;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("parallel counting equals the serial fold exactly") {
  auto truth = make_ground_truth(bench_spec(1));
  auto corpus = generate_corpus(truth, 4000, 99, 0);
  auto sentences = surface_sentences(corpus);

  CountTable serial = count_corpus(sentences);
  for (int threads : {1, 2, 3, 7}) {
    CountTable parallel = count_corpus_parallel(sentences, threads);
    CHECK(parallel.unigram == serial.unigram);
    CHECK(parallel.bigram == serial.bigram);
    CHECK(parallel.total_tokens == serial.total_tokens);
    CHECK(parallel.sentences == serial.sentences);
  }
}

TEST_CASE("parallel perplexity is bit-identical to the serial reference") {
  auto truth = make_ground_truth(bench_spec(2));
  auto train = generate_corpus(truth, 3000, 11, 0);
  auto eval = generate_corpus(truth, 800, 22, 0);

  auto d1 = derive_monolingual(train, LanguageId::L1);
  auto d2 = derive_monolingual(train, LanguageId::L2);
  auto dlm = enforce_conditions(estimate_kneser_ney(count_corpus(d1.sentences)),
                                estimate_kneser_ney(count_corpus(d2.sentences)));
  auto mixed = estimate_kneser_ney(count_corpus(surface_sentences(train)));

  EvalOptions opts;
  auto serial_dlm = evaluate_perplexity(dlm, eval, opts);
  auto serial_mixed = evaluate_perplexity(mixed, eval, opts);
  for (int threads : {1, 2, 5}) {
    auto par_dlm = evaluate_perplexity_parallel(dlm, eval, opts, threads);
    auto par_mixed = evaluate_perplexity_parallel(mixed, eval, opts, threads);
    CHECK(par_dlm.ppl == serial_dlm.ppl);  // exact: same values, same order
    CHECK(par_dlm.tokens == serial_dlm.tokens);
    CHECK(par_dlm.oov_count == serial_dlm.oov_count);
    CHECK(par_mixed.ppl == serial_mixed.ppl);
  }
}

TEST_CASE("parallel generation is bit-identical to the serial reference") {
  auto truth = make_ground_truth(bench_spec(3));
  Corpus serial = generate_corpus(truth, 2000, 1234, 9);
  for (int threads : {1, 2, 4}) {
    Corpus parallel = generate_corpus_parallel(truth, 2000, 1234, 9, 100, threads);
    REQUIRE(parallel.utterances.size() == serial.utterances.size());
    for (std::size_t i = 0; i < serial.utterances.size(); ++i) {
      CHECK(parallel.utterances[i] == serial.utterances[i]);
    }
  }
}

TEST_CASE("perplexity reduction is order-insensitive within 1e-12") {
  auto truth = make_ground_truth(bench_spec(5));
  auto train = generate_corpus(truth, 2000, 31, 0);
  auto eval = generate_corpus(truth, 600, 32, 0);
  auto d1 = derive_monolingual(train, LanguageId::L1);
  auto d2 = derive_monolingual(train, LanguageId::L2);
  auto dlm = enforce_conditions(estimate_kneser_ney(count_corpus(d1.sentences)),
                                estimate_kneser_ney(count_corpus(d2.sentences)));

  EvalOptions opts;
  double base = evaluate_perplexity(dlm, eval, opts).ppl;

  Corpus reversed;
  for (auto it = eval.utterances.rbegin(); it != eval.utterances.rend(); ++it) {
    reversed.add(*it);
  }
  double rev = evaluate_perplexity(dlm, reversed, opts).ppl;
  CHECK(std::abs(base - rev) / base <= 1e-12);
}

TEST_CASE("closed-policy OOV errors propagate out of the parallel region") {
  auto truth = make_ground_truth(bench_spec(4));
  auto train = generate_corpus(truth, 500, 1, 0);
  auto d1 = derive_monolingual(train, LanguageId::L1);
  auto d2 = derive_monolingual(train, LanguageId::L2);
  auto dlm = enforce_conditions(estimate_kneser_ney(count_corpus(d1.sentences)),
                                estimate_kneser_ney(count_corpus(d2.sentences)));

  Corpus eval;
  eval.add(Utterance{{{"unheard-of", LanguageId::L1}}, ""});
  EvalOptions opts;
  opts.oov = OovPolicy::kClosed;
  CHECK_THROWS_AS(evaluate_perplexity_parallel(dlm, eval, opts, 2), Error);
}
