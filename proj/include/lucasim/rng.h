// Copyright 2026 The lucasim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef LUCASIM_RNG_H_
#define LUCASIM_RNG_H_

#include <array>
#include <cstdint>
#include <random>

#include "lucasim/bytes.h"

namespace lucasim {

// Seeded generator shared by every stochastic component. All sampling goes
// through the integer engine with hand-written reductions so that a given
// seed produces the same run regardless of the standard library in use.
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, n). n must be positive.
  std::uint64_t Uniform(std::uint64_t n);
  // Uniform on [lo, hi], inclusive.
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);
  // Uniform on [0, 1).
  double UniformDouble();
  bool Bernoulli(double p) { return UniformDouble() < p; }

  Bytes RandomBytes(std::size_t n);

  template <std::size_t N>
  std::array<std::uint8_t, N> RandomArray() {
    std::array<std::uint8_t, N> out;
    Fill(out.data(), N);
    return out;
  }

  // Independent child stream; consumes one draw from this generator.
  SimRng Fork(std::uint64_t stream);

 private:
  void Fill(std::uint8_t* out, std::size_t n);

  std::mt19937_64 engine_;
};

}  // namespace lucasim

#endif  // LUCASIM_RNG_H_
