// arpa.h
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
// ARPA text format for backoff bigram models. Log base 10 with 7 fractional
// digits; exact-zero probabilities are written as -99 and mapped back to
// exact zero on read. Backoff fields are written for every history,
// including zero backoff weights, so hard zeros survive a round trip.

#ifndef DUALM_ARPA_H_
#define DUALM_ARPA_H_

#include <iosfwd>
#include <string>

#include "dualm/ngram.h"
#include "dualm/util.h"

namespace dualm {

class ArpaParseError : public Error {
 public:
  ArpaParseError(const std::string& what, std::size_t line)
      : Error("ARPA parse error at line " + std::to_string(line) + ": " +
              what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// digits selects the fractional precision of the log10 fields. The
// interchange default is 7; model directories use 12 so reweighted rows
// still normalize within 1e-9 after a reload.
void write_arpa(const BackoffBigramModel& model, std::ostream& out,
                int digits = 7);
void write_arpa_file(const BackoffBigramModel& model, const std::string& path,
                     int digits = 7);

BackoffBigramModel read_arpa(std::istream& in);
BackoffBigramModel read_arpa_file(const std::string& path);

}  // namespace dualm

#endif  // DUALM_ARPA_H_
