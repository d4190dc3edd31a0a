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

#ifndef PROCMAT_LABELS_HPP
#define PROCMAT_LABELS_HPP

#include <Eigen/Dense>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace procmat {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

/// A named tensor factor: an identifier plus the dimension of its space.
struct SystemLabel {
  std::string name;
  Index dim = 1;

  friend bool operator==(const SystemLabel& a, const SystemLabel& b) {
    return a.name == b.name && a.dim == b.dim;
  }
};

using LabelList = std::vector<SystemLabel>;

inline Index total_dim(const LabelList& labels) {
  Index d = 1;
  for (const auto& l : labels) {
    if (l.dim < 1) throw std::invalid_argument("label '" + l.name + "' has dim < 1");
    d *= l.dim;
  }
  return d;
}

inline void check_unique_names(const LabelList& labels) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i].name == labels[j].name)
        throw std::invalid_argument("duplicate label name '" + labels[i].name + "'");
}

inline bool has_label(const LabelList& labels, const std::string& name) {
  for (const auto& l : labels)
    if (l.name == name) return true;
  return false;
}

inline Index label_position(const LabelList& labels, const std::string& name) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i].name == name) return static_cast<Index>(i);
  throw std::invalid_argument("unknown label '" + name + "'");
}

inline Index label_dim(const LabelList& labels, const std::string& name) {
  return labels[static_cast<std::size_t>(label_position(labels, name))].dim;
}

// Canonical party labels used throughout: Alice/Bob input and output spaces,
// always stored in the order AI, AO, BI, BO.
inline constexpr const char* kAI = "AI";
inline constexpr const char* kAO = "AO";
inline constexpr const char* kBI = "BI";
inline constexpr const char* kBO = "BO";

inline LabelList party_labels(Index dai, Index dao, Index dbi, Index dbo) {
  return {{kAI, dai}, {kAO, dao}, {kBI, dbi}, {kBO, dbo}};
}

inline LabelList qubit_party_labels() { return party_labels(2, 2, 2, 2); }

}  // namespace procmat

#endif  // PROCMAT_LABELS_HPP
