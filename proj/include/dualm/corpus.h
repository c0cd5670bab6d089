// corpus.h
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
// Language-tagged corpora: ingestion with pluggable tagging policies,
// utterance-level filtering, speaker-disjoint splitting, and derivation of
// the two complementary marker corpora (other-language spans collapsed to a
// single <sw> token).

#ifndef DUALM_CORPUS_H_
#define DUALM_CORPUS_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dualm {

inline constexpr const char* kSentStart = "<s>";
inline constexpr const char* kSentEnd = "</s>";
inline constexpr const char* kSwitch = "<sw>";
inline constexpr const char* kUnkMarker = "<unk>";

enum class LanguageId { L1, L2 };

LanguageId other_language(LanguageId lang);
std::string language_name(LanguageId lang);
std::optional<LanguageId> parse_language(std::string_view name);

struct TaggedToken {
  std::string surface;
  LanguageId lang;

  bool operator==(const TaggedToken&) const = default;
};

struct Utterance {
  std::vector<TaggedToken> tokens;
  std::string speaker;  // empty = no speaker id

  bool operator==(const Utterance&) const = default;
};

// A tagged corpus with its two (disjoint) vocabularies.
struct Corpus {
  std::vector<Utterance> utterances;
  std::set<std::string> vocab1;
  std::set<std::string> vocab2;

  // Appends an utterance, growing the vocabularies. Throws if a surface has
  // already been seen with the other tag.
  void add(Utterance utt);

  std::size_t token_count() const;
};

struct TaggerConfig {
  enum class Mode {
    kExplicitSuffix,   // token|L1 / token|L2
    kScriptHeuristic,  // CJK codepoints -> cjk_lang, everything else -> other
    kVocabFiles,       // membership in two word lists
  };

  Mode mode = Mode::kExplicitSuffix;
  LanguageId cjk_lang = LanguageId::L1;
  std::set<std::string> vocab1;
  std::set<std::string> vocab2;
};

// Tags a raw corpus line. A leading "speaker<TAB>" field, if present, becomes
// the utterance's speaker id. Tokens whose surface contains one of the
// structural markers <s>, </s>, <sw> are rejected. Empty lines yield an
// utterance with no tokens (callers decide whether that is an error).
Utterance tag_tokens(std::string_view raw_line, const TaggerConfig& cfg);

struct FilterConfig {
  std::vector<std::string> drop_patterns;  // full-token ECMAScript regexes
  bool drop_mixed_script = false;          // CJK and ASCII letters in one token
  bool drop_unk_marker = false;            // token == <unk>
  std::optional<std::string> drop_incomplete_suffix = "-";
};

// Drop counts by reason, in a fixed report order.
struct DropReport {
  std::vector<std::pair<std::string, uint64_t>> counts;
  uint64_t dropped = 0;
  uint64_t kept = 0;

  std::string to_text() const;
};

// Keeps exactly the utterances with no matching token. One matching token
// drops the whole utterance; the first matching reason (in config order:
// patterns, mixed_script, unk, incomplete) is the one counted.
std::pair<Corpus, DropReport> filter_corpus(const Corpus& corpus,
                                            const FilterConfig& cfg);

// Speaker-disjoint greedy split toward per-split utterance-count targets.
// fractions must be positive and sum to 1 (within 1e-9). Deterministic for a
// fixed seed. Throws if any utterance lacks a speaker or there are fewer than
// three speakers.
std::array<Corpus, 3> split_by_speaker(const Corpus& corpus,
                                       const std::array<double, 3>& fractions,
                                       uint64_t seed);

// One language's view of the corpus: kept-language tokens plus <sw> marks.
struct MarkerCorpus {
  LanguageId lang;
  std::vector<std::vector<std::string>> sentences;
};

// Replaces each maximal run of other-language tokens with a single <sw>.
// Utterances entirely in the other language become the one-token sentence
// "<sw>"; every input utterance yields exactly one output sentence.
MarkerCorpus derive_monolingual(const Corpus& corpus, LanguageId keep);

// Plain token sequences with tags stripped (mixed-model training/eval view).
std::vector<std::vector<std::string>> surface_sentences(const Corpus& corpus);

// --- file formats ---
//
// Corpus file: UTF-8, one utterance per line, optional leading
// "speaker<TAB>", whitespace-separated tokens. Written files always use
// explicit-suffix tags so they re-read unambiguously.

Corpus read_corpus(std::istream& in, const TaggerConfig& cfg);
Corpus read_corpus_file(const std::string& path, const TaggerConfig& cfg);
void write_corpus(const Corpus& corpus, std::ostream& out);
void write_corpus_file(const Corpus& corpus, const std::string& path);

// Marker corpus files: one sentence per line, no tags.
void write_marker_corpus(const MarkerCorpus& mc, std::ostream& out);
std::vector<std::vector<std::string>> read_sentences_file(
    const std::string& path);

// Vocab file: one word per line.
std::set<std::string> read_vocab_file(const std::string& path);

}  // namespace dualm

#endif  // DUALM_CORPUS_H_
