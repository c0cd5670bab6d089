// random.h
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
// Deterministic random primitives. Standard-library distributions are
// implementation-defined, so everything that must be bit-reproducible across
// platforms (sampling, shuffles, Dirichlet draws) is built here directly on
// top of std::mt19937_64.

#ifndef DUALM_RANDOM_H_
#define DUALM_RANDOM_H_

#include <cstdint>
#include <random>
#include <vector>

namespace dualm {

// splitmix64 step; used to derive independent per-index seeds.
uint64_t mix_seed(uint64_t seed, uint64_t index);

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();

  // Uniform integer in [0, n), n > 0.
  uint64_t below(uint64_t n);

  // Standard normal via Box-Muller (no state cached between calls).
  double normal();

  // Gamma(alpha, 1), alpha > 0. Marsaglia-Tsang, with the alpha < 1 boost.
  double gamma(double alpha);

  // Dirichlet(alpha, ..., alpha) over k categories; sums to 1.
  std::vector<double> dirichlet(double alpha, std::size_t k);

 private:
  std::mt19937_64 eng_;
};

// In-place Fisher-Yates shuffle that only consumes Rng::below draws.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace dualm

#endif  // DUALM_RANDOM_H_
