// Copyright 2026 the procmat authors
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

#ifndef PROCMAT_MATRIX_IO_HPP
#define PROCMAT_MATRIX_IO_HPP

#include <fstream>

#include <json.hpp>

#include "procmat/labelled_operator.hpp"

namespace procmat {

// MatrixFile: JSON with labelled dimensions and separate dense real and
// imaginary parts, row-major:
//   {"dims": [{"name": "AI", "dim": 2}, ...],
//    "re": [[...], ...], "im": [[...], ...]}
// The "im" field may be omitted for real matrices.

inline nlohmann::json matrix_to_json(const LabelledOperator& op) {
  nlohmann::json j;
  j["dims"] = nlohmann::json::array();
  for (const auto& l : op.labels()) j["dims"].push_back({{"name", l.name}, {"dim", l.dim}});
  const Index n = op.dim();
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Index i = 0; i < n; ++i) {
    nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
    for (Index k = 0; k < n; ++k) {
      rrow.push_back(op.matrix()(i, k).real());
      irow.push_back(op.matrix()(i, k).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

inline LabelledOperator matrix_from_json(const nlohmann::json& j) {
  if (!j.contains("dims") || !j.contains("re"))
    throw std::invalid_argument("matrix file: missing 'dims' or 're'");
  LabelList labels;
  for (const auto& d : j.at("dims"))
    labels.push_back({d.at("name").get<std::string>(), d.at("dim").get<Index>()});
  const Index n = total_dim(labels);
  const auto& re = j.at("re");
  if (Index(re.size()) != n)
    throw std::invalid_argument("matrix file: 're' row count does not match dims");
  CMat m(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = re.at(std::size_t(i));
    if (Index(row.size()) != n)
      throw std::invalid_argument("matrix file: 're' is not square");
    for (Index k = 0; k < n; ++k) m(i, k) = Complex(row.at(std::size_t(k)).get<double>(), 0.0);
  }
  if (j.contains("im")) {
    const auto& im = j.at("im");
    if (Index(im.size()) != n)
      throw std::invalid_argument("matrix file: 'im' row count does not match dims");
    for (Index i = 0; i < n; ++i) {
      const auto& row = im.at(std::size_t(i));
      if (Index(row.size()) != n)
        throw std::invalid_argument("matrix file: 'im' is not square");
      for (Index k = 0; k < n; ++k)
        m(i, k) += Complex(0.0, row.at(std::size_t(k)).get<double>());
    }
  }
  return LabelledOperator(std::move(labels), std::move(m));
}

/// Load a Hermitian matrix file (tolerance 1e-9 on Hermiticity).
inline HermitianOperator load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return HermitianOperator(matrix_from_json(j), 1e-9);
}

inline void save_matrix(const LabelledOperator& op, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << matrix_to_json(op).dump(1) << "\n";
}

}  // namespace procmat

#endif  // PROCMAT_MATRIX_IO_HPP
