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

#include "problem_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <variant>

#include "deepsdp/errors.hpp"

namespace deepsdp::cli {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(std::string(where) + ": missing \"" + key + "\"");
  return j.at(key);
}

double real(const json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
  return j.get<double>();
}

Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j.front().is_array() || j.front().empty())
    throw ParseError(std::string(what) + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(std::string(what) + ": rows differ in length");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = real(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

InputSet input_from_json(const json& j) {
  const auto& type = field(j, "type", "input_set");
  if (!type.is_string()) throw ParseError("input_set.type: expected a string");
  const auto kind = type.get<std::string>();
  InputSet x;
  if (kind == "interval") {
    x = Interval{real(field(j, "lo", "input_set"), "input_set.lo"),
                 real(field(j, "hi", "input_set"), "input_set.hi")};
  } else if (kind == "rectangle") {
    x = Rectangle{vector_from_json(field(j, "center", "input_set"), "input_set.center"),
                  vector_from_json(field(j, "radii", "input_set"), "input_set.radii")};
  } else if (kind == "ellipsoid") {
    x = Ellipsoid{vector_from_json(field(j, "center", "input_set"), "input_set.center"),
                  real(field(j, "radius", "input_set"), "input_set.radius")};
  } else {
    throw ParseError("input_set.type: unknown kind \"" + kind + "\"");
  }
  try {
    deepsdp::validate(x);
  } catch (const deepsdp::Error& e) {
    throw ParseError(std::string("input_set: ") + e.what());
  }
  return x;
}

}  // namespace

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = real(j[i], what);
  return v;
}

void apply_options(const json& j, RunOptions& opts) {
  if (j.is_null()) return;
  if (!j.is_object()) throw ParseError("options: expected an object");
  try {
    if (j.contains("cuts")) opts.cuts = j.at("cuts").get<bool>();
    if (j.contains("tol")) opts.tol = j.at("tol").get<double>();
    if (j.contains("rank_tol")) opts.rank_tol = j.at("rank_tol").get<double>();
    if (j.contains("samples")) opts.samples = j.at("samples").get<int>();
    if (j.contains("seed")) opts.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("options: ") + e.what());
  }
}

void validate(const RunOptions& opts) {
  if (!(opts.tol > 0.0)) throw ParseError("tol must be positive");
  if (!(opts.rank_tol > 0.0)) throw ParseError("rank_tol must be positive");
  if (opts.samples < 0) throw ParseError("samples must be nonnegative");
}

Problem parse_problem(const json& j) {
  if (!j.is_object()) throw ParseError("problem: expected a JSON object");
  const auto& layers = field(field(j, "network", "problem"), "layers", "network");
  if (!layers.is_array()) throw ParseError("network.layers: expected an array");

  std::vector<Layer> parsed;
  for (const auto& l : layers)
    parsed.push_back({matrix_from_json(field(l, "W", "layer"), "layer.W"),
                      vector_from_json(field(l, "b", "layer"), "layer.b")});

  Problem p;
  try {
    p.net = ReluNetwork(std::move(parsed));
  } catch (const deepsdp::Error& e) {
    throw ParseError(std::string("network: ") + e.what());
  }
  p.input = input_from_json(field(j, "input_set", "problem"));
  if (input_dim(p.input) != p.net.input_dim())
    throw ParseError("input_set dimension " + std::to_string(input_dim(p.input)) +
                     " does not match the network input dimension " +
                     std::to_string(p.net.input_dim()));

  const auto& dirs = field(j, "directions", "problem");
  if (!dirs.is_array()) throw ParseError("directions: expected an array");
  for (const auto& d : dirs) {
    Vector c = vector_from_json(d, "direction");
    if (c.size() != p.net.output_dim())
      throw ParseError("direction of length " + std::to_string(c.size()) +
                       " for output dimension " + std::to_string(p.net.output_dim()));
    p.directions.push_back(std::move(c));
  }
  if (j.contains("options")) apply_options(j.at("options"), p.options);
  return p;
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_problem(j);
}

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

json to_json(const InputSet& x) {
  if (const auto* iv = std::get_if<Interval>(&x))
    return {{"type", "interval"}, {"lo", iv->lo}, {"hi", iv->hi}};
  if (const auto* r = std::get_if<Rectangle>(&x))
    return {{"type", "rectangle"}, {"center", to_json(r->center)}, {"radii", to_json(r->radii)}};
  const auto& e = std::get<Ellipsoid>(x);
  return {{"type", "ellipsoid"}, {"center", to_json(e.center)}, {"radius", e.radius}};
}

json to_json(const ReluNetwork& net) {
  json layers = json::array();
  for (const auto& l : net.layers()) {
    json w = json::array();
    for (Eigen::Index r = 0; r < l.w.rows(); ++r) w.push_back(to_json(Vector(l.w.row(r).transpose())));
    layers.push_back({{"W", w}, {"b", to_json(l.b)}});
  }
  return {{"layers", layers}};
}

}  // namespace deepsdp::cli
