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

#include "deepsdp/network.hpp"

#include <cmath>
#include <string>

#include "deepsdp/errors.hpp"

namespace deepsdp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

bool is_identity(const Matrix& m, double tol = 0.0) {
  return m.rows() == m.cols() &&
         (m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

bool is_diagonal(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

Vector relu(const Vector& v) { return v.cwiseMax(0.0); }

}  // namespace

ReluNetwork::ReluNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.size() < 2)
    throw InvalidInput("network needs at least one activation layer and an output layer");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const Layer& l = layers_[k];
    const std::string where = "layer " + std::to_string(k);
    if (l.w.rows() < 1 || l.w.cols() < 1) throw InvalidInput(where + ": empty weight matrix");
    if (l.b.size() != l.w.rows())
      throw InvalidInput(where + ": bias has length " + std::to_string(l.b.size()) +
                         ", W is " + shape(l.w));
    if (!l.w.allFinite() || !l.b.allFinite()) throw InvalidInput(where + ": non-finite entry");
    if (k > 0 && l.w.cols() != layers_[k - 1].w.rows())
      throw InvalidInput(where + ": W is " + shape(l.w) + " but previous layer has " +
                         std::to_string(layers_[k - 1].w.rows()) + " outputs");
  }
}

int ReluNetwork::width(int k) const {
  if (k == 0) return static_cast<int>(layers_.front().w.cols());
  return static_cast<int>(layers_.at(k - 1).w.rows());
}

int ReluNetwork::num_neurons() const {
  int n = 0;
  for (int k = 1; k <= depth(); ++k) n += width(k);
  return n;
}

int ReluNetwork::neuron_offset(int k) const {
  int off = 0;
  for (int j = 1; j < k; ++j) off += width(j);
  return off;
}

int input_dim(const InputSet& x) {
  return std::visit(Overloaded{[](const Interval&) { return 1; },
                               [](const Rectangle& r) { return static_cast<int>(r.center.size()); },
                               [](const Ellipsoid& e) { return static_cast<int>(e.center.size()); }},
                    x);
}

std::string kind_name(const InputSet& x) {
  return std::visit(Overloaded{[](const Interval&) { return std::string("interval"); },
                               [](const Rectangle&) { return std::string("rectangle"); },
                               [](const Ellipsoid&) { return std::string("ellipsoid"); }},
                    x);
}

void validate(const InputSet& x) {
  std::visit(
      Overloaded{
          [](const Interval& i) {
            if (!std::isfinite(i.lo) || !std::isfinite(i.hi))
              throw InvalidInput("interval bounds must be finite");
            if (i.lo > i.hi) throw InvalidInput("interval has lo > hi");
          },
          [](const Rectangle& r) {
            if (r.center.size() < 1) throw InvalidInput("rectangle has dimension 0");
            if (r.radii.size() != r.center.size())
              throw InvalidInput("rectangle radii and center differ in length");
            if (!r.center.allFinite() || !r.radii.allFinite())
              throw InvalidInput("rectangle has non-finite data");
            if ((r.radii.array() <= 0.0).any()) throw InvalidInput("rectangle radii must be > 0");
          },
          [](const Ellipsoid& e) {
            if (e.center.size() < 1) throw InvalidInput("ellipsoid has dimension 0");
            if (!e.center.allFinite() || !std::isfinite(e.radius))
              throw InvalidInput("ellipsoid has non-finite data");
            if (!(e.radius > 0.0)) throw InvalidInput("ellipsoid radius must be > 0");
          }},
      x);
}

Rectangle to_rectangle(const Interval& x) {
  return {Vector::Constant(1, x.center()), Vector::Constant(1, 0.5 * (x.hi - x.lo))};
}

Interval to_interval(const Rectangle& x) {
  if (x.center.size() != 1) throw InvalidInput("only a one-dimensional rectangle is an interval");
  return {x.center(0) - x.radii(0), x.center(0) + x.radii(0)};
}

Vector center(const InputSet& x) {
  return std::visit(Overloaded{[](const Interval& i) { return Vector(Vector::Constant(1, i.center())); },
                               [](const Rectangle& r) { return r.center; },
                               [](const Ellipsoid& e) { return e.center; }},
                    x);
}

bool contains(const InputSet& x, const Vector& p, double tol) {
  if (p.size() != input_dim(x)) return false;
  return std::visit(
      Overloaded{[&](const Interval& i) { return p(0) >= i.lo - tol && p(0) <= i.hi + tol; },
                 [&](const Rectangle& r) {
                   return ((p - r.center).cwiseAbs() - r.radii).maxCoeff() <= tol;
                 },
                 [&](const Ellipsoid& e) { return (p - e.center).norm() <= e.radius + tol; }},
      x);
}

void validate(const SafetySpec& spec, int output_dim) {
  for (std::size_t l = 0; l < spec.directions.size(); ++l) {
    const Vector& c = spec.directions[l];
    const std::string where = "direction " + std::to_string(l);
    if (c.size() != output_dim)
      throw InvalidInput(where + " has length " + std::to_string(c.size()) + ", output has " +
                         std::to_string(output_dim));
    if (!c.allFinite()) throw InvalidInput(where + " has non-finite entries");
    if (c.cwiseAbs().maxCoeff() == 0.0) throw InvalidInput(where + " is zero");
  }
}

Vector ForwardTrace::stacked_neurons() const {
  Eigen::Index n = 0;
  for (std::size_t k = 1; k < activations.size(); ++k) n += activations[k].size();
  Vector out(n);
  Eigen::Index off = 0;
  for (std::size_t k = 1; k < activations.size(); ++k) {
    out.segment(off, activations[k].size()) = activations[k];
    off += activations[k].size();
  }
  return out;
}

ForwardTrace forward_trace(const ReluNetwork& net, const Vector& x0) {
  if (x0.size() != net.input_dim())
    throw InvalidInput("input has length " + std::to_string(x0.size()) + ", network expects " +
                       std::to_string(net.input_dim()));
  ForwardTrace t;
  t.activations.push_back(x0);
  for (int k = 0; k < net.depth(); ++k) {
    const Layer& l = net.layer(k);
    t.activations.push_back(relu(l.w * t.activations.back() + l.b));
  }
  const Layer& last = net.layer(net.depth());
  t.output = last.w * t.activations.back() + last.b;
  return t;
}

Vector forward(const ReluNetwork& net, const Vector& x0) { return forward_trace(net, x0).output; }

std::string to_string(TheoremCase c) {
  switch (c) {
    case TheoremCase::kSingleNeuron: return "single_neuron";
    case TheoremCase::kEllipsoid: return "ellipsoid";
    case TheoremCase::kRectangle: return "rectangle";
  }
  return "unknown";
}

std::vector<AssumptionCheck> check_assumptions(const ReluNetwork& net, const InputSet& x,
                                               const SafetySpec& spec, TheoremCase which,
                                               bool cuts) {
  std::vector<AssumptionCheck> out;
  const bool single_layer = net.depth() == 1;

  bool spec_ok = true;
  std::string spec_detail = std::to_string(spec.directions.size()) + " half-spaces";
  try {
    validate(spec, net.output_dim());
  } catch (const InvalidInput& e) {
    spec_ok = false;
    spec_detail = e.what();
  }

  auto last_layer_identity = [&]() -> AssumptionCheck {
    const Layer& last = net.layer(net.depth());
    const bool ok = is_identity(last.w) && last.b.cwiseAbs().maxCoeff() == 0.0;
    return {"identity_last_layer", ok, ok ? "W^L = I, b^L = 0" : "last layer not identity"};
  };

  switch (which) {
    case TheoremCase::kSingleNeuron: {
      const bool interval = std::holds_alternative<Interval>(x) ||
                            (std::holds_alternative<Rectangle>(x) && input_dim(x) == 1);
      out.push_back({"interval_input", interval, interval ? "closed interval" : kind_name(x)});
      out.push_back({"polytope_spec", spec_ok, spec_detail});
      bool shape_ok = single_layer && net.input_dim() == 1 && net.width(1) == 1 &&
                      net.output_dim() == 1;
      if (shape_ok) {
        shape_ok = net.layer(0).w(0, 0) == 1.0 && net.layer(1).w(0, 0) == 1.0 &&
                   net.layer(1).b(0) == 0.0;
      }
      out.push_back({"single_neuron_shape", shape_ok,
                     shape_ok ? "L = 1, n0 = n1 = 1, W0 = W1 = 1, b1 = 0"
                              : "not a unit-weight single neuron"});
      break;
    }
    case TheoremCase::kEllipsoid:
    case TheoremCase::kRectangle: {
      const bool want_ball = which == TheoremCase::kEllipsoid;
      const bool kind_ok = want_ball ? std::holds_alternative<Ellipsoid>(x)
                                     : !std::holds_alternative<Ellipsoid>(x);
      out.push_back({want_ball ? "ellipsoid_input" : "rectangle_input", kind_ok, kind_name(x)});
      out.push_back({"single_layer", single_layer, "L = " + std::to_string(net.depth())});
      out.push_back({"polytope_spec", spec_ok, spec_detail});
      out.push_back(last_layer_identity());
      out.push_back({"no_repeated_nonlinearity", !cuts,
                     cuts ? "repeated-nonlinearity cuts enabled" : "cuts disabled"});
      if (!want_ball) {
        const Matrix& w0 = net.layer(0).w;
        const bool ident = is_identity(w0);
        std::string detail = "W0 = I";
        if (!ident) {
          const bool diag = is_diagonal(w0) && (w0.diagonal().array() != 0.0).all();
          detail = diag ? "W0 diagonal, reducible to I" : "W0 not identity";
        }
        out.push_back({"identity_first_layer", ident, detail});
      }
      break;
    }
  }
  return out;
}

DiagonalReduction normalize_diagonal_weight(const ReluNetwork& net, const Rectangle& x) {
  if (net.depth() != 1) throw NotReducible("diagonal reduction needs a single-layer network");
  const Matrix& w0 = net.layer(0).w;
  if (!is_diagonal(w0)) throw NotReducible("W0 is not diagonal");
  if (w0.rows() != x.center.size()) throw NotReducible("W0 and the rectangle differ in dimension");
  const Vector scale = w0.diagonal();
  for (Eigen::Index j = 0; j < scale.size(); ++j)
    if (scale(j) == 0.0) throw NotReducible("W0 has a zero diagonal entry at " + std::to_string(j));

  std::vector<Layer> layers = net.layers();
  layers[0].w = Matrix::Identity(w0.rows(), w0.cols());
  Rectangle mapped{scale.cwiseProduct(x.center), scale.cwiseAbs().cwiseProduct(x.radii)};
  return {ReluNetwork(std::move(layers)), std::move(mapped), scale};
}

InputNormalization normalize_input(const ReluNetwork& net, const InputSet& x) {
  validate(x);
  if (input_dim(x) != net.input_dim()) throw InvalidInput("input set and network differ in dimension");
  InputNormalization out;
  const auto n = static_cast<Eigen::Index>(net.input_dim());
  std::visit(Overloaded{[&](const Interval& i) {
                          out.shift = Vector::Constant(1, i.center());
                          out.scale = Vector::Constant(1, 0.5 * (i.hi - i.lo));
                          out.input = Interval{-1.0, 1.0};
                        },
                        [&](const Rectangle& r) {
                          out.shift = r.center;
                          out.scale = r.radii;
                          out.input = Rectangle{Vector::Zero(n), Vector::Ones(n)};
                        },
                        [&](const Ellipsoid& e) {
                          out.shift = e.center;
                          out.scale = Vector::Constant(n, e.radius);
                          out.input = Ellipsoid{Vector::Zero(n), 1.0};
                        }},
             x);
  std::vector<Layer> layers = net.layers();
  layers[0].b = net.layer(0).b + net.layer(0).w * out.shift;
  layers[0].w = net.layer(0).w * out.scale.asDiagonal();
  out.net = ReluNetwork(std::move(layers));
  return out;
}

Vector sample_input(const InputSet& x, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return std::visit(
      Overloaded{[&](const Interval& i) {
                   return Vector(Vector::Constant(1, i.lo + (i.hi - i.lo) * unit(rng)));
                 },
                 [&](const Rectangle& r) {
                   Vector p(r.center.size());
                   for (Eigen::Index j = 0; j < p.size(); ++j)
                     p(j) = r.center(j) + r.radii(j) * (2.0 * unit(rng) - 1.0);
                   return p;
                 },
                 [&](const Ellipsoid& e) {
                   std::normal_distribution<double> gauss;
                   const auto n = e.center.size();
                   Vector dir(n);
                   do {
                     for (auto& v : dir) v = gauss(rng);
                   } while (dir.norm() == 0.0);
                   const double r = e.radius * std::pow(unit(rng), 1.0 / static_cast<double>(n));
                   return Vector(e.center + r * dir.normalized());
                 }},
      x);
}

}  // namespace deepsdp
