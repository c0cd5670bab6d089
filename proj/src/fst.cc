// fst.cc
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

#include "dualm/fst.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dualm/util.h"

namespace dualm {

std::size_t WeightedAcceptor::arc_count() const {
  std::size_t n = 0;
  for (const auto& state_arcs : arcs) n += state_arcs.size();
  return n;
}

namespace {

// Shared skeleton: start state, one state per word, end state. The prob
// callback returns linear probabilities; zero-probability arcs are omitted.
template <typename StartProb, typename TransProb, typename EndProb>
WeightedAcceptor build_acceptor(const std::vector<std::string>& words,
                                StartProb&& start_prob, TransProb&& trans_prob,
                                EndProb&& end_prob) {
  WeightedAcceptor fsa;
  const std::size_t k = words.size();
  fsa.symbols.reserve(k + 1);
  fsa.symbols.emplace_back("<eps>");
  for (std::size_t i = 0; i < k; ++i) {
    fsa.symbols.push_back(words[i]);
    fsa.symbol_ids[words[i]] = static_cast<int32_t>(i + 1);
  }

  const int32_t start_state = 0;
  const auto word_state = [](std::size_t i) {
    return static_cast<int32_t>(i + 1);
  };
  const int32_t end_state = static_cast<int32_t>(k + 1);

  fsa.arcs.assign(k + 2, {});
  fsa.final_weight.assign(k + 2, kPosInf);
  fsa.start = start_state;
  fsa.final_weight[end_state] = 0.0;

  // + 0.0 turns the -0.0 of unit probabilities into plain zero.
  for (std::size_t j = 0; j < k; ++j) {
    double p = start_prob(j);
    if (p > 0.0) {
      fsa.arcs[start_state].push_back(
          {word_state(j), static_cast<int32_t>(j + 1), -std::log(p) + 0.0});
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double p = trans_prob(i, j);
      if (p > 0.0) {
        fsa.arcs[word_state(i)].push_back(
            {word_state(j), static_cast<int32_t>(j + 1), -std::log(p) + 0.0});
      }
    }
    double pe = end_prob(i);
    if (pe > 0.0) fsa.final_weight[word_state(i)] = -std::log(pe) + 0.0;
  }
  // Arcs come out label-sorted because words are iterated in symbol order.
  return fsa;
}

}  // namespace

WeightedAcceptor export_dlm_fst(const DualLM& dlm) {
  if (!dlm.lm1.conditions_enforced || !dlm.lm2.conditions_enforced) {
    throw Error("export_dlm_fst: conditions must be enforced first");
  }
  std::vector<std::string> words(dlm.vocab1.begin(), dlm.vocab1.end());
  words.insert(words.end(), dlm.vocab2.begin(), dlm.vocab2.end());
  std::sort(words.begin(), words.end());

  return build_acceptor(
      words,
      [&](std::size_t j) { return combined_prob(dlm, kSentStart, words[j]); },
      [&](std::size_t i, std::size_t j) {
        return combined_prob(dlm, words[i], words[j]);
      },
      [&](std::size_t i) { return combined_prob(dlm, words[i], kSentEnd); });
}

WeightedAcceptor export_mixed_fst(const BackoffBigramModel& model) {
  auto vocab = model.vocab();
  vocab.erase(kSentStart);
  vocab.erase(kSentEnd);
  std::vector<std::string> words(vocab.begin(), vocab.end());

  auto prob = [&](const std::string& h, const std::string& w) {
    return std::exp(model.cond_logprob(h, w));
  };
  return build_acceptor(
      words, [&](std::size_t j) { return prob(kSentStart, words[j]); },
      [&](std::size_t i, std::size_t j) { return prob(words[i], words[j]); },
      [&](std::size_t i) { return prob(words[i], kSentEnd); });
}

PathScore score_path(const WeightedAcceptor& acceptor,
                     std::span<const std::string> sentence) {
  PathScore score;
  int32_t state = acceptor.start;
  double weight = 0.0;
  for (const auto& word : sentence) {
    auto sit = acceptor.symbol_ids.find(word);
    if (sit == acceptor.symbol_ids.end()) return score;
    int32_t label = sit->second;
    const auto& arcs = acceptor.arcs[state];
    auto ait = std::lower_bound(
        arcs.begin(), arcs.end(), label,
        [](const AcceptorArc& a, int32_t l) { return a.label < l; });
    if (ait == arcs.end() || ait->label != label) return score;
    weight += ait->weight;
    state = ait->target;
  }
  if (sentence.empty()) return score;  // no empty accepting path
  if (acceptor.final_weight[state] == kPosInf) return score;
  score.accepted = true;
  score.weight = weight + acceptor.final_weight[state];
  return score;
}

void write_att_text(const WeightedAcceptor& acceptor, std::ostream& out) {
  for (std::size_t s = 0; s < acceptor.arcs.size(); ++s) {
    for (const auto& arc : acceptor.arcs[s]) {
      out << s << '\t' << arc.target << '\t' << acceptor.symbols[arc.label]
          << '\t' << format_full(arc.weight) << '\n';
    }
  }
  for (std::size_t s = 0; s < acceptor.final_weight.size(); ++s) {
    if (acceptor.final_weight[s] != kPosInf) {
      out << s << '\t' << format_full(acceptor.final_weight[s]) << '\n';
    }
  }
}

void write_symbol_table(const WeightedAcceptor& acceptor, std::ostream& out) {
  for (std::size_t id = 0; id < acceptor.symbols.size(); ++id) {
    out << acceptor.symbols[id] << '\t' << id << '\n';
  }
}

void write_acceptor_files(const WeightedAcceptor& acceptor,
                          const std::string& prefix) {
  {
    std::ofstream out(prefix + ".fst.txt", std::ios::binary);
    if (!out) throw Error("cannot write " + prefix + ".fst.txt");
    write_att_text(acceptor, out);
  }
  {
    std::ofstream out(prefix + ".syms", std::ios::binary);
    if (!out) throw Error("cannot write " + prefix + ".syms");
    write_symbol_table(acceptor, out);
  }
}

}  // namespace dualm
