// corpus.cc
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

#include "dualm/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "dualm/random.h"
#include "dualm/util.h"

namespace dualm {

LanguageId other_language(LanguageId lang) {
  return lang == LanguageId::L1 ? LanguageId::L2 : LanguageId::L1;
}

std::string language_name(LanguageId lang) {
  return lang == LanguageId::L1 ? "L1" : "L2";
}

std::optional<LanguageId> parse_language(std::string_view name) {
  if (name == "L1") return LanguageId::L1;
  if (name == "L2") return LanguageId::L2;
  return std::nullopt;
}

void Corpus::add(Utterance utt) {
  if (utt.tokens.empty()) throw Error("empty utterance");
  for (const auto& tok : utt.tokens) {
    auto& mine = tok.lang == LanguageId::L1 ? vocab1 : vocab2;
    const auto& theirs = tok.lang == LanguageId::L1 ? vocab2 : vocab1;
    if (theirs.count(tok.surface)) {
      throw Error("token \"" + tok.surface +
                  "\" appears with both language tags");
    }
    mine.insert(tok.surface);
  }
  utterances.push_back(std::move(utt));
}

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& u : utterances) n += u.tokens.size();
  return n;
}

namespace {

bool contains_structural_marker(std::string_view surface) {
  return surface.find(kSentStart) != std::string_view::npos ||
         surface.find(kSentEnd) != std::string_view::npos ||
         surface.find(kSwitch) != std::string_view::npos;
}

TaggedToken tag_one(const std::string& raw, const TaggerConfig& cfg) {
  std::string surface = raw;
  std::optional<LanguageId> lang;

  switch (cfg.mode) {
    case TaggerConfig::Mode::kExplicitSuffix: {
      if (raw.size() > 3 && raw.ends_with("|L1")) {
        surface = raw.substr(0, raw.size() - 3);
        lang = LanguageId::L1;
      } else if (raw.size() > 3 && raw.ends_with("|L2")) {
        surface = raw.substr(0, raw.size() - 3);
        lang = LanguageId::L2;
      } else {
        throw Error("untaggable token \"" + raw +
                    "\" (expected |L1 or |L2 suffix)");
      }
      break;
    }
    case TaggerConfig::Mode::kScriptHeuristic: {
      lang = has_cjk(raw) ? cfg.cjk_lang : other_language(cfg.cjk_lang);
      break;
    }
    case TaggerConfig::Mode::kVocabFiles: {
      bool in1 = cfg.vocab1.count(raw) > 0;
      bool in2 = cfg.vocab2.count(raw) > 0;
      if (in1 && in2) {
        throw Error("token \"" + raw + "\" listed in both vocab files");
      }
      if (in1) lang = LanguageId::L1;
      else if (in2) lang = LanguageId::L2;
      else throw Error("untaggable token \"" + raw + "\"");
      break;
    }
  }

  if (surface.empty()) throw Error("empty token surface");
  if (contains_structural_marker(surface)) {
    throw Error("token \"" + surface + "\" matches a reserved marker");
  }
  return TaggedToken{std::move(surface), *lang};
}

}  // namespace

Utterance tag_tokens(std::string_view raw_line, const TaggerConfig& cfg) {
  Utterance utt;
  std::string_view rest = raw_line;
  auto tab = raw_line.find('\t');
  if (tab != std::string_view::npos) {
    utt.speaker = std::string(raw_line.substr(0, tab));
    rest = raw_line.substr(tab + 1);
  }
  for (const auto& raw : split_whitespace(rest)) {
    utt.tokens.push_back(tag_one(raw, cfg));
  }
  return utt;
}

std::string DropReport::to_text() const {
  std::ostringstream out;
  for (const auto& [reason, count] : counts) {
    out << reason << "=" << count << "\n";
  }
  out << "dropped=" << dropped << "\n";
  out << "kept=" << kept << "\n";
  return out.str();
}

std::pair<Corpus, DropReport> filter_corpus(const Corpus& corpus,
                                            const FilterConfig& cfg) {
  std::vector<std::regex> patterns;
  patterns.reserve(cfg.drop_patterns.size());
  for (const auto& p : cfg.drop_patterns) {
    try {
      patterns.emplace_back(p);
    } catch (const std::regex_error& e) {
      throw Error("bad drop pattern \"" + p + "\": " + e.what());
    }
  }

  // Reason keys in fixed report order.
  std::vector<std::string> reasons;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    reasons.push_back("pattern" + std::to_string(i) + ":" +
                      cfg.drop_patterns[i]);
  }
  reasons.emplace_back("mixed_script");
  reasons.emplace_back("unk");
  reasons.emplace_back("incomplete");
  std::map<std::string, uint64_t> tally;

  auto drop_reason =
      [&](const Utterance& utt) -> std::optional<std::string> {
    for (const auto& tok : utt.tokens) {
      for (std::size_t i = 0; i < patterns.size(); ++i) {
        if (std::regex_match(tok.surface, patterns[i])) return reasons[i];
      }
      if (cfg.drop_mixed_script && has_cjk(tok.surface) &&
          has_ascii_alnum(tok.surface)) {
        return "mixed_script";
      }
      if (cfg.drop_unk_marker && tok.surface == kUnkMarker) return "unk";
      if (cfg.drop_incomplete_suffix && !cfg.drop_incomplete_suffix->empty() &&
          tok.surface.ends_with(*cfg.drop_incomplete_suffix)) {
        return "incomplete";
      }
    }
    return std::nullopt;
  };

  Corpus kept;
  DropReport report;
  for (const auto& utt : corpus.utterances) {
    if (auto reason = drop_reason(utt)) {
      ++tally[*reason];
      ++report.dropped;
    } else {
      kept.add(utt);
      ++report.kept;
    }
  }
  for (const auto& r : reasons) {
    if (auto it = tally.find(r); it != tally.end()) {
      report.counts.emplace_back(r, it->second);
    }
  }
  return {std::move(kept), std::move(report)};
}

std::array<Corpus, 3> split_by_speaker(const Corpus& corpus,
                                       const std::array<double, 3>& fractions,
                                       uint64_t seed) {
  double fsum = fractions[0] + fractions[1] + fractions[2];
  if (fractions[0] <= 0 || fractions[1] <= 0 || fractions[2] <= 0 ||
      std::abs(fsum - 1.0) > 1e-9) {
    throw Error("split fractions must be positive and sum to 1");
  }

  std::map<std::string, uint64_t> speaker_counts;
  for (const auto& utt : corpus.utterances) {
    if (utt.speaker.empty()) {
      throw Error("split_by_speaker: utterance without speaker id");
    }
    ++speaker_counts[utt.speaker];
  }
  if (speaker_counts.size() < 3) {
    throw Error("split_by_speaker: need at least 3 speakers, have " +
                std::to_string(speaker_counts.size()));
  }

  // Seeded shuffle breaks ties among equal-count speakers; the stable sort
  // then orders by utterance count, largest first.
  std::vector<std::pair<std::string, uint64_t>> speakers(
      speaker_counts.begin(), speaker_counts.end());
  Rng rng(seed);
  shuffle(speakers, rng);
  std::stable_sort(speakers.begin(), speakers.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });

  const double total = static_cast<double>(corpus.utterances.size());
  std::array<double, 3> target{fractions[0] * total, fractions[1] * total,
                               fractions[2] * total};
  std::array<double, 3> assigned{0, 0, 0};
  std::array<std::size_t, 3> members{0, 0, 0};
  std::map<std::string, int> speaker_split;

  for (std::size_t si = 0; si < speakers.size(); ++si) {
    std::size_t remaining = speakers.size() - si;
    std::size_t empty_splits =
        (members[0] == 0) + (members[1] == 0) + (members[2] == 0);
    int best = -1;
    if (remaining <= empty_splits) {
      // Just enough speakers left: fill the empty splits, neediest first.
      double best_need = -kPosInf;
      for (int k = 0; k < 3; ++k) {
        if (members[k] != 0) continue;
        double need = target[k] - assigned[k];
        if (need > best_need) {
          best_need = need;
          best = k;
        }
      }
    } else {
      double best_need = -kPosInf;
      for (int k = 0; k < 3; ++k) {
        double need = target[k] - assigned[k];
        if (need > best_need) {
          best_need = need;
          best = k;
        }
      }
    }
    speaker_split[speakers[si].first] = best;
    assigned[best] += static_cast<double>(speakers[si].second);
    ++members[best];
  }

  std::array<Corpus, 3> out;
  for (const auto& utt : corpus.utterances) {
    out[speaker_split.at(utt.speaker)].add(utt);
  }
  return out;
}

MarkerCorpus derive_monolingual(const Corpus& corpus, LanguageId keep) {
  MarkerCorpus mc;
  mc.lang = keep;
  mc.sentences.reserve(corpus.utterances.size());
  for (const auto& utt : corpus.utterances) {
    std::vector<std::string> sent;
    bool in_other_run = false;
    for (const auto& tok : utt.tokens) {
      if (tok.lang == keep) {
        sent.push_back(tok.surface);
        in_other_run = false;
      } else {
        if (!in_other_run) sent.emplace_back(kSwitch);
        in_other_run = true;
      }
    }
    mc.sentences.push_back(std::move(sent));
  }
  return mc;
}

std::vector<std::vector<std::string>> surface_sentences(const Corpus& corpus) {
  std::vector<std::vector<std::string>> out;
  out.reserve(corpus.utterances.size());
  for (const auto& utt : corpus.utterances) {
    std::vector<std::string> sent;
    sent.reserve(utt.tokens.size());
    for (const auto& tok : utt.tokens) sent.push_back(tok.surface);
    out.push_back(std::move(sent));
  }
  return out;
}

Corpus read_corpus(std::istream& in, const TaggerConfig& cfg) {
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Utterance utt;
    try {
      utt = tag_tokens(line, cfg);
    } catch (const Error& e) {
      throw Error("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (utt.tokens.empty()) continue;  // blank lines are skipped
    corpus.add(std::move(utt));
  }
  return corpus;
}

Corpus read_corpus_file(const std::string& path, const TaggerConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file: " + path);
  try {
    return read_corpus(in, cfg);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& utt : corpus.utterances) {
    if (!utt.speaker.empty()) out << utt.speaker << '\t';
    for (std::size_t i = 0; i < utt.tokens.size(); ++i) {
      if (i) out << ' ';
      out << utt.tokens[i].surface << '|'
          << language_name(utt.tokens[i].lang);
    }
    out << '\n';
  }
}

void write_corpus_file(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file: " + path);
  write_corpus(corpus, out);
  if (!out) throw Error("write failed: " + path);
}

void write_marker_corpus(const MarkerCorpus& mc, std::ostream& out) {
  for (const auto& sent : mc.sentences) {
    for (std::size_t i = 0; i < sent.size(); ++i) {
      if (i) out << ' ';
      out << sent[i];
    }
    out << '\n';
  }
}

std::vector<std::vector<std::string>> read_sentences_file(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto toks = split_whitespace(line);
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  return out;
}

std::set<std::string> read_vocab_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open vocab file: " + path);
  std::set<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto toks = split_whitespace(line);
    if (toks.size() > 1) {
      throw Error(path + ": vocab lines must hold one word: \"" + line + "\"");
    }
    if (!toks.empty()) vocab.insert(toks[0]);
  }
  return vocab;
}

}  // namespace dualm
