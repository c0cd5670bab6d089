// util.h
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
// Small shared helpers: error type, tokenization, UTF-8 script tests,
// fixed-format number printing, compensated summation.

#ifndef DUALM_UTIL_H_
#define DUALM_UTIL_H_

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dualm {

// Domain error. CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Splits on runs of ASCII whitespace; never returns empty fields.
std::vector<std::string> split_whitespace(std::string_view line);

// True if the token contains at least one CJK codepoint (Unified Ideographs,
// Extension A/B+, compatibility block). Invalid UTF-8 bytes count as non-CJK.
bool has_cjk(std::string_view token);

// True if the token contains at least one ASCII letter or digit.
bool has_ascii_alnum(std::string_view token);

// Fixed-point decimal with the given number of fractional digits ("%.*f").
std::string format_fixed(double x, int digits);

// Shortest round-trippable representation ("%.17g").
std::string format_full(double x);

// Neumaier-compensated sum in index order; deterministic for a fixed input
// sequence regardless of how the values were produced.
double compensated_sum(std::span<const double> values);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace dualm

#endif  // DUALM_UTIL_H_
