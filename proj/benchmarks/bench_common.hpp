// Copyright 2026 The deepsdp Authors
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

#pragma once

#include <random>

#include "deepsdp/network.hpp"

namespace deepsdp::bench {

// Single-layer net with random W0, b0 in [-1, 1] and identity output layer.
inline ReluNetwork random_single_layer(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix w(n, n);
  Vector b(n);
  for (auto& v : w.reshaped()) v = u(rng);
  for (auto& v : b) v = u(rng);
  return ReluNetwork({{w, b}, {Matrix::Identity(n, n), Vector::Zero(n)}});
}

inline Vector unit_first(int n) { return Vector::Unit(n, 0); }

}  // namespace deepsdp::bench
