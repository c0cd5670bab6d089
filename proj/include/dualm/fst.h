// fst.h
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
// Weighted finite-state acceptors compiled from bigram models. The encoding
// is the fully expanded exact one: a state per history word, backoff folded
// into arc weights, no epsilon arcs. Weights are negative natural logs in
// the tropical convention (path weight = sum of arc weights plus the final
// weight). End of sentence is a final weight, not an arc.

#ifndef DUALM_FST_H_
#define DUALM_FST_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dualm/dlm.h"
#include "dualm/ngram.h"

namespace dualm {

struct AcceptorArc {
  int32_t target;
  int32_t label;   // symbol id
  double weight;   // -ln p
};

struct WeightedAcceptor {
  // State 0 is the start state; the last state is the structural end state
  // (final weight 0, no outgoing arcs). Word states sit in between.
  std::vector<std::vector<AcceptorArc>> arcs;   // sorted by label per state
  std::vector<double> final_weight;             // +inf = not final
  std::vector<std::string> symbols;             // id -> word; id 0 = <eps>
  std::map<std::string, int32_t> symbol_ids;
  int32_t start = 0;

  std::size_t state_count() const { return arcs.size(); }
  std::size_t arc_count() const;
};

// Compiles an enforced DualLM per the combined conditional: one state per
// word in V1 + V2 plus new start and end states; cross-language transitions
// carry the product weight -ln(P_i[<sw>|w] * P_j[w'|<sw>]) on a single arc.
// Throws if the DLM is not condition-enforced.
WeightedAcceptor export_dlm_fst(const DualLM& dlm);

// Same encoding for a single backoff bigram model (the mixed baseline).
WeightedAcceptor export_mixed_fst(const BackoffBigramModel& model);

struct PathScore {
  bool accepted = false;
  double weight = 0.0;
};

// Follows the unique path labeled by the sentence; not-accepted when a label
// is missing, has no arc from the current state, or the last state is not
// final. The empty sentence is never accepted.
PathScore score_path(const WeightedAcceptor& acceptor,
                     std::span<const std::string> sentence);

// AT&T text format: "src<TAB>dst<TAB>label<TAB>weight" arc lines with word
// labels, then "state<TAB>weight" final lines. The companion symbol table
// has lines "symbol<TAB>id" with id 0 reserved for <eps>.
void write_att_text(const WeightedAcceptor& acceptor, std::ostream& out);
void write_symbol_table(const WeightedAcceptor& acceptor, std::ostream& out);
void write_acceptor_files(const WeightedAcceptor& acceptor,
                          const std::string& prefix);

}  // namespace dualm

#endif  // DUALM_FST_H_
