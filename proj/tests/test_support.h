// Shared helpers for the test binaries. Not part of the library.

#ifndef DUALM_TESTS_TEST_SUPPORT_H_
#define DUALM_TESTS_TEST_SUPPORT_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dualm/corpus.h"
#include "dualm/dlm.h"
#include "dualm/ngram.h"
#include "dualm/random.h"
#include "dualm/util.h"

namespace dualm::testing {

// The fixed toy corpus D = {"a b", "a x", "x a"} with V1 = {a, b},
// V2 = {x}; the shared hand-computed oracle throughout the test suite.
inline Corpus toy_corpus() {
  Corpus corpus;
  auto L1 = LanguageId::L1;
  auto L2 = LanguageId::L2;
  corpus.add(Utterance{{{"a", L1}, {"b", L1}}, "spkA"});
  corpus.add(Utterance{{{"a", L1}, {"x", L2}}, "spkB"});
  corpus.add(Utterance{{{"x", L2}, {"a", L1}}, "spkC"});
  return corpus;
}

inline CountTable toy_counts(LanguageId keep) {
  auto derived = derive_monolingual(toy_corpus(), keep);
  return count_corpus(derived.sentences);
}

// MLE + reweighting on the toy corpus.
inline DualLM toy_mle_dlm() {
  return enforce_conditions(estimate_mle(toy_counts(LanguageId::L1)),
                            estimate_mle(toy_counts(LanguageId::L2)));
}

// Golden files: "history<TAB>word<TAB>probability" per line.
inline std::map<std::pair<std::string, std::string>, double> read_golden(
    const std::string& name) {
  std::string text = read_file(std::string(DUALM_GOLDEN_DIR) + "/" + name);
  std::map<std::pair<std::string, std::string>, double> entries;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    auto fields = split_whitespace(text.substr(pos, nl - pos));
    if (fields.size() == 3) {
      entries[{fields[0], fields[1]}] = std::strtod(fields[2].c_str(), nullptr);
    }
    pos = nl + 1;
  }
  return entries;
}

// Random tagged corpus over abstract vocabularies; exercises mixed-language
// structure without any synth-module machinery.
inline Corpus random_corpus(Rng& rng, std::size_t v1, std::size_t v2,
                            std::size_t n_sentences, std::size_t max_len = 12,
                            std::size_t n_speakers = 5) {
  Corpus corpus;
  for (std::size_t i = 0; i < n_sentences; ++i) {
    Utterance utt;
    if (n_speakers > 0) {
      utt.speaker = "spk" + std::to_string(rng.below(n_speakers));
    }
    std::size_t len = 1 + rng.below(max_len);
    for (std::size_t j = 0; j < len; ++j) {
      bool side1 = rng.uniform() < 0.6;
      if (side1) {
        utt.tokens.push_back(
            {"a" + std::to_string(rng.below(v1)), LanguageId::L1});
      } else {
        utt.tokens.push_back(
            {"b" + std::to_string(rng.below(v2)), LanguageId::L2});
      }
    }
    corpus.add(std::move(utt));
  }
  return corpus;
}

// Full-conditional row sum over the model's target words.
inline double row_sum(const BackoffBigramModel& model,
                      const std::string& history) {
  std::vector<double> terms;
  for (const auto& w : model.target_words()) {
    terms.push_back(std::exp(model.cond_logprob(history, w)));
  }
  return compensated_sum(terms);
}

}  // namespace dualm::testing

#endif  // DUALM_TESTS_TEST_SUPPORT_H_
