// arpa.cc
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

#include "dualm/arpa.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dualm/corpus.h"
#include "dualm/util.h"

namespace dualm {

namespace {

constexpr double kLn10 = 2.302585092994045684;
constexpr double kZeroLog10 = -99.0;

std::string log10_field(double natural_log, int digits) {
  if (natural_log == kNegInf) return format_fixed(kZeroLog10, digits);
  double l10 = natural_log / kLn10;
  if (l10 <= kZeroLog10) return format_fixed(kZeroLog10, digits);
  return format_fixed(l10, digits);
}

double parse_log10(const std::string& field, std::size_t line) {
  char* end = nullptr;
  double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    throw ArpaParseError("bad log-probability field \"" + field + "\"", line);
  }
  if (v <= kZeroLog10) return kNegInf;
  return v * kLn10;
}

}  // namespace

void write_arpa(const BackoffBigramModel& model, std::ostream& out,
                int digits) {
  // Unigram section covers every vocabulary word plus <s>.
  std::set<std::string> words;
  for (const auto& [w, lp] : model.unigram) words.insert(w);
  for (const auto& [h, row] : model.rows) words.insert(h);
  words.insert(kSentStart);

  std::size_t bigrams = 0;
  for (const auto& [h, row] : model.rows) bigrams += row.size();

  out << "\\data\\\n";
  out << "ngram 1=" << words.size() << "\n";
  out << "ngram 2=" << bigrams << "\n";
  out << "\n\\1-grams:\n";
  for (const auto& w : words) {
    out << log10_field(model.unigram_logprob(w), digits) << '\t' << w;
    if (model.rows.count(w)) {
      auto it = model.backoff.find(w);
      out << '\t'
          << log10_field(
                 it == model.backoff.end() ? kNegInf : it->second, digits);
    }
    out << '\n';
  }
  out << "\n\\2-grams:\n";
  for (const auto& [h, row] : model.rows) {
    for (const auto& [w, lp] : row) {
      out << log10_field(lp, digits) << '\t' << h << ' ' << w << '\n';
    }
  }
  out << "\n\\end\\\n";
}

void write_arpa_file(const BackoffBigramModel& model, const std::string& path,
                     int digits) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write ARPA file: " + path);
  write_arpa(model, out, digits);
  if (!out) throw Error("write failed: " + path);
}

BackoffBigramModel read_arpa(std::istream& in) {
  BackoffBigramModel model;
  model.smoothing = Smoothing::kUnspecified;

  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&](std::string& s) -> bool {
    while (std::getline(in, s)) {
      ++lineno;
      if (!s.empty() && s.back() == '\r') s.pop_back();
      return true;
    }
    return false;
  };
  auto next_nonblank = [&](std::string& s) -> bool {
    while (next_line(s)) {
      if (!split_whitespace(s).empty()) return true;
    }
    return false;
  };

  if (!next_nonblank(line) || line != "\\data\\") {
    throw ArpaParseError("expected \\data\\ header", lineno);
  }

  std::size_t expect1 = 0, expect2 = 0;
  bool have1 = false, have2 = false;
  while (next_nonblank(line)) {
    if (line.rfind("ngram ", 0) == 0) {
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ArpaParseError("malformed ngram count line", lineno);
      }
      int order = std::atoi(line.substr(6, eq - 6).c_str());
      unsigned long n = std::strtoul(line.c_str() + eq + 1, nullptr, 10);
      if (order == 1) {
        expect1 = n;
        have1 = true;
      } else if (order == 2) {
        expect2 = n;
        have2 = true;
      } else {
        throw ArpaParseError("only bigram models are supported (order " +
                                 std::to_string(order) + " declared)",
                             lineno);
      }
    } else {
      break;
    }
  }
  if (!have1 || !have2) {
    throw ArpaParseError("\\data\\ section must declare 1-gram and 2-gram "
                         "counts",
                         lineno);
  }
  if (line != "\\1-grams:") {
    throw ArpaParseError("expected \\1-grams: section", lineno);
  }

  std::size_t got1 = 0;
  while (next_nonblank(line)) {
    if (line[0] == '\\') break;
    auto fields = split_whitespace(line);
    if (fields.size() != 2 && fields.size() != 3) {
      throw ArpaParseError("1-gram line must have 2 or 3 fields", lineno);
    }
    double lp = parse_log10(fields[0], lineno);
    const std::string& word = fields[1];
    model.unigram[word] = lp;
    if (fields.size() == 3) {
      model.backoff[word] = parse_log10(fields[2], lineno);
      model.rows[word];  // history exists even if it has no explicit bigrams
    }
    ++got1;
  }
  if (got1 != expect1) {
    throw ArpaParseError("\\data\\ declared " + std::to_string(expect1) +
                             " unigrams but section listed " +
                             std::to_string(got1),
                         lineno);
  }
  if (line != "\\2-grams:") {
    throw ArpaParseError("expected \\2-grams: section", lineno);
  }

  std::size_t got2 = 0;
  while (next_nonblank(line)) {
    if (line[0] == '\\') break;
    auto fields = split_whitespace(line);
    if (fields.size() != 3) {
      throw ArpaParseError("2-gram line must have 3 fields", lineno);
    }
    double lp = parse_log10(fields[0], lineno);
    model.rows[fields[1]][fields[2]] = lp;
    if (!model.backoff.count(fields[1])) model.backoff[fields[1]] = kNegInf;
    ++got2;
  }
  if (got2 != expect2) {
    throw ArpaParseError("\\data\\ declared " + std::to_string(expect2) +
                             " bigrams but section listed " +
                             std::to_string(got2),
                         lineno);
  }
  if (line != "\\end\\") {
    throw ArpaParseError("expected \\end\\ terminator", lineno);
  }

  // <s> surfaced only as a unigram entry: drop the pseudo unigram so queries
  // keep treating it as a non-event.
  auto sit = model.unigram.find(kSentStart);
  if (sit != model.unigram.end() && sit->second == kNegInf) {
    model.unigram.erase(sit);
  }
  return model;
}

BackoffBigramModel read_arpa_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open ARPA file: " + path);
  try {
    return read_arpa(in);
  } catch (const ArpaParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace dualm
