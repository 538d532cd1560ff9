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
#include <string>
#include <variant>
#include <vector>

#include "deepsdp/linalg.hpp"

namespace deepsdp {

using linalg::Matrix;
using linalg::Vector;

/// One affine map x -> W x + b.
struct Layer {
  Matrix w;
  Vector b;
};

/// x^{k+1} = max(0, W^k x^k + b^k) for k < L, output W^L x^L + b^L.
class ReluNetwork {
 public:
  ReluNetwork() = default;
  /// Throws InvalidInput unless there are at least two layers with chained
  /// dimensions.
  explicit ReluNetwork(std::vector<Layer> layers);

  /// Number of activation layers L.
  int depth() const { return static_cast<int>(layers_.size()) - 1; }
  /// n_k for k = 0..L+1; n_{L+1} is the output dimension.
  int width(int k) const;
  int input_dim() const { return width(0); }
  int output_dim() const { return width(depth() + 1); }
  /// N = n_1 + ... + n_L.
  int num_neurons() const;
  /// Offset of layer k's neurons (k >= 1) inside the stacked vector
  /// (x^1, ..., x^L).
  int neuron_offset(int k) const;

  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(int k) const { return layers_.at(k); }

 private:
  std::vector<Layer> layers_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double center() const { return 0.5 * (lo + hi); }
};

/// Axis-aligned box |x_j - center_j| <= radii_j.
struct Rectangle {
  Vector center;
  Vector radii;
};

/// Ball ||x - center|| <= radius.
struct Ellipsoid {
  Vector center;
  double radius = 1.0;
};

using InputSet = std::variant<Interval, Rectangle, Ellipsoid>;

int input_dim(const InputSet& x);
/// "interval", "rectangle" or "ellipsoid".
std::string kind_name(const InputSet& x);
/// Throws InvalidInput on lo > hi, non-positive radii or non-finite data.
void validate(const InputSet& x);
Rectangle to_rectangle(const Interval& x);
/// Throws InvalidInput unless the rectangle is one-dimensional.
Interval to_interval(const Rectangle& x);
/// Center point x-hat of the set.
Vector center(const InputSet& x);
bool contains(const InputSet& x, const Vector& point, double tol = 1e-12);

/// Half-space directions c^l; offsets d_l are filled in by the verifier.
struct SafetySpec {
  std::vector<Vector> directions;
  std::vector<double> offsets;
};

/// Throws InvalidInput on zero directions or a dimension mismatch.
void validate(const SafetySpec& spec, int output_dim);

/// Post-activation values x^0..x^L plus the output.
struct ForwardTrace {
  std::vector<Vector> activations;
  Vector output;
  /// (x^1, ..., x^L) stacked.
  Vector stacked_neurons() const;
};

Vector forward(const ReluNetwork& net, const Vector& x0);
ForwardTrace forward_trace(const ReluNetwork& net, const Vector& x0);

enum class TheoremCase { kSingleNeuron, kEllipsoid, kRectangle };

std::string to_string(TheoremCase c);

struct AssumptionCheck {
  std::string id;
  bool holds = false;
  std::string detail;
};

/// Structural hypotheses of the selected tightness result. The
/// repeated-nonlinearity item reflects `cuts`, not the network.
std::vector<AssumptionCheck> check_assumptions(const ReluNetwork& net, const InputSet& x,
                                               const SafetySpec& spec, TheoremCase which,
                                               bool cuts);

struct DiagonalReduction {
  ReluNetwork net;
  Rectangle input;
  Vector scale;  // diagonal of the original W^0
};

/// Substitutes x' = W^0 x for a single-layer network with nonsingular
/// diagonal W^0. Throws NotReducible otherwise.
DiagonalReduction normalize_diagonal_weight(const ReluNetwork& net, const Rectangle& x);

/// Affine change of input variable x = shift + scale .* s that maps X onto
/// the unit interval [-1, 1], the unit box or the unit ball, with the first
/// layer absorbing the map. f(shift + scale .* s) equals net.forward(s).
struct InputNormalization {
  ReluNetwork net;
  InputSet input;
  Vector shift;
  Vector scale;
};

InputNormalization normalize_input(const ReluNetwork& net, const InputSet& x);

/// One point drawn from X: uniform on boxes, uniform in the ball.
Vector sample_input(const InputSet& x, std::mt19937_64& rng);

}  // namespace deepsdp
