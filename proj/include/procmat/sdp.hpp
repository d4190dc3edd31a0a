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

#ifndef PROCMAT_SDP_HPP
#define PROCMAT_SDP_HPP

#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "procmat/labelled_operator.hpp"

namespace procmat {

// ---------------------------------------------------------------------------
// Problem description
//
// Standard conic pair over complex Hermitian PSD blocks X = (X_1, ..., X_B):
//
//   primal:  optimize  sum_b tr(C_b X_b)   s.t.  sum_b tr(A_{i,b} X_b) = v_i,
//                                                X_b >= 0
//   dual:    the Lagrangian dual with one real multiplier per constraint row.
//
// Coefficients are complex Hermitian and may be sparse; internally every
// block is embedded as a real symmetric matrix [[Re, -Im], [Im, Re]] with
// coefficients halved, which leaves objective values, right-hand sides and
// dual multipliers unchanged.
// ---------------------------------------------------------------------------

enum class SdpSense { Minimize, Maximize };
enum class SdpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

inline const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::Unbounded: return "unbounded";
    default: return "numerical_failure";
  }
}

struct SdpEntry {
  int row = 0;
  int col = 0;
  Complex value;
};

struct SdpCoefficient {
  int block = 0;
  std::vector<SdpEntry> entries;  // Hermitian, both triangles listed

  static SdpCoefficient dense(int block, const CMat& h, double prune = 1e-14) {
    SdpCoefficient c;
    c.block = block;
    for (Index i = 0; i < h.rows(); ++i)
      for (Index j = 0; j < h.cols(); ++j)
        if (std::abs(h(i, j)) > prune)
          c.entries.push_back({int(i), int(j), h(i, j)});
    return c;
  }
};

struct SdpConstraint {
  std::vector<SdpCoefficient> coeff;
  double rhs = 0;
};

struct SdpProblem {
  SdpSense sense = SdpSense::Maximize;
  std::vector<std::string> block_names;
  std::vector<Index> block_sides;
  std::vector<CMat> objective;  // one Hermitian matrix per block
  std::vector<SdpConstraint> constraints;

  int add_block(const std::string& name, Index side) {
    block_names.push_back(name);
    block_sides.push_back(side);
    objective.push_back(CMat::Zero(side, side));
    return int(block_names.size()) - 1;
  }

  void set_objective(int block, const CMat& h) {
    check_block(block, h);
    objective[static_cast<std::size_t>(block)] = 0.5 * (h + h.adjoint());
  }

  void add_constraint(SdpConstraint c) { constraints.push_back(std::move(c)); }

  void add_constraint(const std::vector<std::pair<int, CMat>>& coeffs, double rhs) {
    SdpConstraint c;
    c.rhs = rhs;
    for (const auto& [b, h] : coeffs) {
      check_block(b, h);
      c.coeff.push_back(SdpCoefficient::dense(b, 0.5 * (h + h.adjoint())));
    }
    constraints.push_back(std::move(c));
  }

 private:
  void check_block(int block, const CMat& h) const {
    if (block < 0 || block >= int(block_sides.size()))
      throw std::invalid_argument("SdpProblem: unknown block index");
    const Index side = block_sides[static_cast<std::size_t>(block)];
    if (h.rows() != side || h.cols() != side)
      throw std::invalid_argument("SdpProblem: coefficient size mismatch on block '" +
                                  block_names[static_cast<std::size_t>(block)] + "'");
    if (max_abs(CMat(0.5 * (h - h.adjoint()))) > 1e-10 * std::max(1.0, max_abs(h)))
      throw std::invalid_argument("SdpProblem: coefficient is not Hermitian");
  }
};

struct SdpOptions {
  double feas_tol = 1e-9;
  double gap_tol = 1e-8;
  int max_iter = 200;
  bool verbose = false;
  double step_fraction = 0.99;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  double primal_value = 0;
  double dual_value = 0;
  double gap = 0;  // |primal - dual|
  double primal_residual = 0;
  double dual_residual = 0;
  std::vector<CMat> block_values;        // complex PSD blocks
  std::vector<double> dual_multipliers;  // one per constraint, pruned rows zero
  int iterations = 0;
  std::string message;
};

/// Sparse text dump for cross-checking against external solvers. Format, one
/// record per line:
///   block <index> <name> <side>
///   obj <block> <row> <col> <re> <im>
///   rhs <constraint> <value>
///   coef <constraint> <block> <row> <col> <re> <im>
/// Complex entries are listed for the upper triangle including the diagonal.
inline void dump_problem(const SdpProblem& p, std::ostream& os) {
  os << "sense " << (p.sense == SdpSense::Maximize ? "maximize" : "minimize") << "\n";
  os << std::setprecision(17);
  for (std::size_t b = 0; b < p.block_sides.size(); ++b)
    os << "block " << b << " " << p.block_names[b] << " " << p.block_sides[b] << "\n";
  for (std::size_t b = 0; b < p.objective.size(); ++b)
    for (Index i = 0; i < p.objective[b].rows(); ++i)
      for (Index j = i; j < p.objective[b].cols(); ++j)
        if (std::abs(p.objective[b](i, j)) > 0)
          os << "obj " << b << " " << i << " " << j << " " << p.objective[b](i, j).real()
             << " " << p.objective[b](i, j).imag() << "\n";
  for (std::size_t k = 0; k < p.constraints.size(); ++k) {
    os << "rhs " << k << " " << p.constraints[k].rhs << "\n";
    for (const auto& c : p.constraints[k].coeff)
      for (const auto& t : c.entries)
        if (t.col >= t.row)
          os << "coef " << k << " " << c.block << " " << t.row << " " << t.col << " "
             << t.value.real() << " " << t.value.imag() << "\n";
  }
}

// ---------------------------------------------------------------------------
// Solver internals
// ---------------------------------------------------------------------------

namespace sdp_detail {

struct RealEntry {
  int i, j;
  double v;
};

// One constraint row after real embedding: per block, a sparse list plus an
// optional dense matrix for rows too dense for the quadratic sparse formula.
struct Row {
  std::vector<std::vector<RealEntry>> sparse;  // per block
  std::vector<std::optional<RMat>> dense;      // per block, set when dense
  double rhs = 0;
  double norm = 0;  // Frobenius norm before scaling
  int original_index = -1;
};

// Real symmetric embedding of a complex Hermitian coefficient, halved:
// H -> (1/2) [[Re H, -Im H], [Im H, Re H]]. tr(E(A) E(X)) with both halved
// then doubled by the embedding reproduces the complex inner product.
inline void embed_entries(const SdpCoefficient& c, Index side, std::vector<RealEntry>& out) {
  const int n = int(side);
  for (const auto& t : c.entries) {
    const double re = 0.5 * t.value.real();
    const double im = 0.5 * t.value.imag();
    if (re != 0.0) {
      out.push_back(RealEntry{t.row, t.col, re});
      out.push_back(RealEntry{t.row + n, t.col + n, re});
    }
    if (im != 0.0) {
      out.push_back(RealEntry{t.row, t.col + n, -im});
      out.push_back(RealEntry{t.row + n, t.col, im});
    }
  }
}

inline RMat embed_dense(const CMat& h) {
  const Index n = h.rows();
  RMat m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = 0.5 * h.real();
  m.bottomRightCorner(n, n) = 0.5 * h.real();
  m.topRightCorner(n, n) = -0.5 * h.imag();
  m.bottomLeftCorner(n, n) = 0.5 * h.imag();
  return m;
}

inline CMat unembed(const RMat& m) {
  const Index n = m.rows() / 2;
  CMat out(n, n);
  out.real() = 0.5 * (m.topLeftCorner(n, n) + m.bottomRightCorner(n, n));
  out.imag() = 0.5 * (m.bottomLeftCorner(n, n) - m.topRightCorner(n, n));
  return 0.5 * (out + CMat(out.adjoint()));
}

inline double dot_row_mat(const std::vector<RealEntry>& row, const RMat& x) {
  double s = 0;
  for (const auto& e : row) s += e.v * x(e.i, e.j);
  return s;
}

// <A_r, W A_s W> computed entrywise through the sparse patterns.
inline double quad_rows(const std::vector<RealEntry>& a, const std::vector<RealEntry>& b,
                        const RMat& w) {
  double s = 0;
  for (const auto& ea : a) {
    const auto wrow = w.row(ea.j);
    const auto wcol = w.col(ea.i);
    for (const auto& eb : b) s += ea.v * eb.v * wrow(eb.i) * wcol(eb.j);
  }
  return s;
}

struct Blocks {
  std::vector<RMat> m;

  Blocks() = default;
  explicit Blocks(const std::vector<Index>& sides) {
    for (Index s : sides) m.push_back(RMat::Zero(2 * s, 2 * s));
  }
  void set_identity(double scale) {
    for (auto& b : m) b = scale * RMat::Identity(b.rows(), b.cols());
  }
  double dot(const Blocks& o) const {
    double s = 0;
    for (std::size_t b = 0; b < m.size(); ++b)
      s += (m[b].array() * o.m[b].array()).sum();
    return s;
  }
  double frob() const { return std::sqrt(dot(*this)); }
  Index total_side() const {
    Index n = 0;
    for (const auto& b : m) n += b.rows();
    return n;
  }
  void symmetrize() {
    for (auto& b : m) b = 0.5 * (b + b.transpose()).eval();
  }
};

// Presolve: scale rows to unit norm, drop dependent rows via pivoted Cholesky
// of the Gram matrix, and check right-hand-side consistency of dropped rows.
struct Presolve {
  std::vector<Row> rows;               // kept rows, scaled
  std::vector<int> kept_original;      // original index per kept row
  std::vector<double> scales;          // norm per kept row (original units)
  bool inconsistent = false;
  std::string message;
};

inline Presolve preprocess(std::vector<Row> all, double rank_tol = 1e-12,
                           double rhs_tol = 1e-9) {
  Presolve out;
  const std::size_t m = all.size();
  std::vector<std::size_t> nonzero;
  for (std::size_t i = 0; i < m; ++i) {
    if (all[i].norm > 1e-13) {
      nonzero.push_back(i);
    } else if (std::abs(all[i].rhs) > rhs_tol) {
      out.inconsistent = true;
      out.message = "zero row with nonzero right-hand side";
      return out;
    }
  }

  // Gram matrix of normalized rows.
  const std::size_t k = nonzero.size();
  RMat gram(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    const Row& ra = all[nonzero[a]];
    for (std::size_t b = a; b < k; ++b) {
      const Row& rb = all[nonzero[b]];
      double s = 0;
      for (std::size_t blk = 0; blk < ra.sparse.size(); ++blk) {
        if (ra.sparse[blk].empty() || rb.sparse[blk].empty()) continue;
        if (ra.dense[blk]) {
          s += dot_row_mat(rb.sparse[blk], *ra.dense[blk]);
        } else if (rb.dense[blk]) {
          s += dot_row_mat(ra.sparse[blk], *rb.dense[blk]);
        } else {
          double acc = 0;
          for (const auto& ea : ra.sparse[blk])
            for (const auto& eb : rb.sparse[blk])
              if (ea.i == eb.i && ea.j == eb.j) acc += ea.v * eb.v;
          s += acc;
        }
      }
      s /= all[nonzero[a]].norm * all[nonzero[b]].norm;
      gram(a, b) = s;
      gram(b, a) = s;
    }
  }

  // Greedy pivoted Cholesky on the Gram matrix; pivot residuals below
  // rank_tol mark dependent rows.
  RMat g = gram;
  std::vector<std::size_t> pivots;
  std::vector<char> used(k, 0);
  for (;;) {
    int best = -1;
    double best_d = rank_tol;
    for (std::size_t i = 0; i < k; ++i)
      if (!used[i] && g(i, i) > best_d) {
        best_d = g(i, i);
        best = int(i);
      }
    if (best < 0) break;
    const std::size_t p = std::size_t(best);
    used[p] = 1;
    const double d = std::sqrt(g(p, p));
    RVec col = RVec::Zero(k);
    for (std::size_t i = 0; i < k; ++i)
      if (!used[i]) col(Index(i)) = g(i, p) / d;
    col(Index(p)) = d;
    for (std::size_t i = 0; i < k; ++i) {
      if (used[i]) continue;
      for (std::size_t j = 0; j < k; ++j)
        if (!used[j]) g(i, j) -= col(Index(i)) * col(Index(j));
    }
    pivots.push_back(p);
  }

  // Consistency of dropped rows: solve the least-squares combination on the
  // selected rows through the Gram system.
  std::vector<char> selected(k, 0);
  for (auto p : pivots) selected[p] = 1;
  if (pivots.size() < k) {
    RMat gs(pivots.size(), pivots.size());
    RVec bs(pivots.size());
    for (std::size_t a = 0; a < pivots.size(); ++a) {
      bs(Index(a)) = all[nonzero[pivots[a]]].rhs / all[nonzero[pivots[a]]].norm;
      for (std::size_t b = 0; b < pivots.size(); ++b) gs(Index(a), Index(b)) = gram(pivots[a], pivots[b]);
    }
    Eigen::LDLT<RMat> ldlt(gs);
    for (std::size_t i = 0; i < k; ++i) {
      if (selected[i]) continue;
      RVec gi(pivots.size());
      for (std::size_t a = 0; a < pivots.size(); ++a) gi(Index(a)) = gram(pivots[a], i);
      const RVec coef = ldlt.solve(gi);
      const double predicted = coef.dot(bs);
      const double actual = all[nonzero[i]].rhs / all[nonzero[i]].norm;
      if (std::abs(predicted - actual) > rhs_tol * (1.0 + std::abs(actual))) {
        out.inconsistent = true;
        out.message = "dependent constraint row with inconsistent right-hand side";
        return out;
      }
    }
  }

  for (auto p : pivots) {
    Row r = all[nonzero[p]];
    const double s = r.norm;
    for (auto& blk : r.sparse)
      for (auto& e : blk) e.v /= s;
    for (auto& d : r.dense)
      if (d) *d /= s;
    r.rhs /= s;
    out.scales.push_back(s);
    out.kept_original.push_back(r.original_index);
    out.rows.push_back(std::move(r));
  }
  return out;
}

}  // namespace sdp_detail

/// Solve a dense-block SDP with a Nesterov-Todd scaled primal-dual
/// predictor-corrector method.
inline SdpSolution solve(const SdpProblem& problem, const SdpOptions& opts = {}) {
  using namespace sdp_detail;
  SdpSolution sol;
  const std::size_t nblocks = problem.block_sides.size();
  const std::size_t m_orig = problem.constraints.size();
  if (nblocks == 0) throw std::invalid_argument("solve: no blocks");
  const double sign = problem.sense == SdpSense::Maximize ? -1.0 : 1.0;

  // Internal form: minimize <C, X>.
  std::vector<RMat> cost;
  double cost_norm = 0;
  for (std::size_t b = 0; b < nblocks; ++b) {
    cost.push_back(sign * embed_dense(problem.objective[b]));
    cost_norm = std::max(cost_norm, cost.back().cwiseAbs().maxCoeff());
  }

  std::vector<Row> raw;
  for (std::size_t kidx = 0; kidx < m_orig; ++kidx) {
    const auto& con = problem.constraints[kidx];
    Row row;
    row.sparse.resize(nblocks);
    row.dense.resize(nblocks);
    row.rhs = con.rhs;
    row.original_index = int(kidx);
    for (const auto& c : con.coeff) {
      if (c.block < 0 || c.block >= int(nblocks))
        throw std::invalid_argument("solve: constraint references unknown block");
      embed_entries(c, problem.block_sides[std::size_t(c.block)], row.sparse[std::size_t(c.block)]);
    }
    double norm2 = 0;
    for (std::size_t b = 0; b < nblocks; ++b) {
      for (const auto& e : row.sparse[b]) norm2 += e.v * e.v;
      const std::size_t area = std::size_t(problem.block_sides[b]) * std::size_t(problem.block_sides[b]);
      if (row.sparse[b].size() > area / 2 + 8) {
        RMat d = RMat::Zero(2 * problem.block_sides[b], 2 * problem.block_sides[b]);
        for (const auto& e : row.sparse[b]) d(e.i, e.j) += e.v;
        row.dense[b] = std::move(d);
      }
    }
    row.norm = std::sqrt(norm2);
    raw.push_back(std::move(row));
  }

  Presolve pre = preprocess(std::move(raw));
  if (pre.inconsistent) {
    sol.status = SdpStatus::Infeasible;
    sol.message = "presolve: " + pre.message;
    sol.dual_multipliers.assign(m_orig, 0.0);
    return sol;
  }
  const std::size_t m = pre.rows.size();
  const auto& rows = pre.rows;

  RVec b(m);
  for (std::size_t i = 0; i < m; ++i) b(Index(i)) = rows[i].rhs;

  std::vector<Index> sides(problem.block_sides.begin(), problem.block_sides.end());
  Blocks X(sides), Z(sides);
  const double nsum = double(X.total_side());

  double maxb = m ? b.cwiseAbs().maxCoeff() : 0.0;
  const double xi_p = std::max({10.0, std::sqrt(nsum), nsum * maxb / (1.0 + 1.0)});
  const double xi_d = std::max({10.0, std::sqrt(nsum), cost_norm * std::sqrt(nsum)});
  X.set_identity(xi_p);
  Z.set_identity(xi_d);
  RVec y = RVec::Zero(m);

  auto apply_A = [&](const Blocks& v) {
    RVec out(m);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0;
      for (std::size_t blk = 0; blk < nblocks; ++blk)
        if (!rows[i].sparse[blk].empty()) s += dot_row_mat(rows[i].sparse[blk], v.m[blk]);
      out(Index(i)) = s;
    }
    return out;
  };
  auto apply_At = [&](const RVec& v) {
    Blocks out(sides);
    for (std::size_t i = 0; i < m; ++i) {
      const double c = v(Index(i));
      if (c == 0.0) continue;
      for (std::size_t blk = 0; blk < nblocks; ++blk)
        for (const auto& e : rows[i].sparse[blk]) out.m[blk](e.i, e.j) += c * e.v;
    }
    return out;
  };

  const double bnorm = 1.0 + (m ? b.norm() : 0.0);
  double cnorm = 1.0;
  for (const auto& cb : cost) cnorm += cb.squaredNorm();
  cnorm = std::sqrt(cnorm);

  SdpStatus status = SdpStatus::NumericalFailure;
  std::string message = "iteration limit reached";
  int iter = 0;
  double pres = 0, dres = 0, pobj = 0, dobj = 0;

  std::vector<RMat> wmat(nblocks), rfac(nblocks), rinv(nblocks);
  std::vector<RVec> lams(nblocks);

  for (iter = 0; iter < opts.max_iter; ++iter) {
    // residuals
    RVec rp = b - apply_A(X);
    Blocks atY = apply_At(y);
    Blocks Rd(sides);
    for (std::size_t blk = 0; blk < nblocks; ++blk)
      Rd.m[blk] = cost[blk] - Z.m[blk] - atY.m[blk];

    pobj = 0;
    for (std::size_t blk = 0; blk < nblocks; ++blk)
      pobj += (cost[blk].array() * X.m[blk].array()).sum();
    dobj = m ? b.dot(y) : 0.0;
    const double mu = X.dot(Z) / nsum;

    pres = rp.norm() / bnorm;
    double dn = 0;
    for (const auto& r : Rd.m) dn += r.squaredNorm();
    dres = std::sqrt(dn) / cnorm;
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));

    if (opts.verbose) {
      std::ostringstream oss;
      oss << "iter " << iter << " mu " << mu << " pres " << pres << " dres " << dres
          << " gap " << relgap << " pobj " << pobj << " dobj " << dobj;
      sol.message += oss.str() + "\n";
    }

    // Weak duality guard: with both residuals essentially closed, the primal
    // objective may not undercut the dual beyond the complementarity slack.
    if (pres < 1e-9 && dres < 1e-9 && pobj - dobj < -1e-6 * (1.0 + std::abs(pobj))) {
      status = SdpStatus::NumericalFailure;
      message = "weak duality violated";
      break;
    }

    if (pres <= opts.feas_tol && dres <= opts.feas_tol && relgap <= opts.gap_tol) {
      status = SdpStatus::Optimal;
      message = "converged";
      break;
    }

    // Divergence heuristics (no feasible interior solution to hit).
    if (dobj > 1e9 * std::max(1.0, cost_norm) && dres < 1e-7 && pres > opts.feas_tol) {
      status = SdpStatus::Infeasible;
      message = "dual objective diverging with a near-feasible dual iterate";
      break;
    }
    if (pobj < -1e9 * std::max(1.0, maxb + 1.0) && pres < 1e-7) {
      status = SdpStatus::Unbounded;
      message = "primal objective diverging with a near-feasible primal iterate";
      break;
    }

    // Nesterov-Todd scaling per block via Cholesky + SVD:
    // R = L_x V S^{-1/2} gives W = R R^T with W Z W = X and R^T Z R = S.
    bool scaling_ok = true;
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
      Eigen::LLT<RMat> lx(X.m[blk]), lz(Z.m[blk]);
      if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) {
        scaling_ok = false;
        break;
      }
      const RMat Lx = lx.matrixL();
      const RMat Lz = lz.matrixL();
      Eigen::BDCSVD<RMat> svd(RMat(Lz.transpose() * Lx),
                              Eigen::ComputeThinU | Eigen::ComputeThinV);
      RVec s = svd.singularValues();
      if (s.minCoeff() <= 0) {
        scaling_ok = false;
        break;
      }
      lams[blk] = s;
      const RMat v = svd.matrixV();
      rfac[blk] = Lx * v * s.cwiseSqrt().cwiseInverse().asDiagonal();
      rinv[blk] = s.cwiseSqrt().cwiseInverse().asDiagonal() * svd.matrixU().transpose() *
                  Lz.transpose();
      wmat[blk] = rfac[blk] * rfac[blk].transpose();
    }
    if (!scaling_ok) {
      status = SdpStatus::NumericalFailure;
      message = "scaling failure: iterate left the PSD cone";
      break;
    }

    // Schur complement M_rs = <A_r, W A_s W>.
    RMat schur = RMat::Zero(m, m);
    {
      // Dense path per row when available; sparse quadratic form otherwise.
      std::vector<std::vector<std::optional<RMat>>> gcache(m);
      for (std::size_t r = 0; r < m; ++r) gcache[r].resize(nblocks);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t blk = 0; blk < nblocks; ++blk)
          if (rows[r].dense[blk])
            gcache[r][blk] = RMat(wmat[blk] * (*rows[r].dense[blk]) * wmat[blk]);

      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t s = r; s < m; ++s) {
          double acc = 0;
          for (std::size_t blk = 0; blk < nblocks; ++blk) {
            const auto& ra = rows[r].sparse[blk];
            const auto& rb = rows[s].sparse[blk];
            if (ra.empty() || rb.empty()) continue;
            if (gcache[s][blk]) {
              acc += dot_row_mat(ra, *gcache[s][blk]);
            } else if (gcache[r][blk]) {
              acc += dot_row_mat(rb, *gcache[r][blk]);
            } else {
              acc += quad_rows(ra, rb, wmat[blk]);
            }
          }
          schur(Index(r), Index(s)) = acc;
          schur(Index(s), Index(r)) = acc;
        }
      }
    }
    Eigen::LDLT<RMat> schur_fac(schur);
    if (schur_fac.info() != Eigen::Success) {
      schur.diagonal().array() += 1e-12 * (1.0 + schur.diagonal().maxCoeff());
      schur_fac.compute(schur);
      if (schur_fac.info() != Eigen::Success) {
        status = SdpStatus::NumericalFailure;
        message = "Schur complement factorization failed";
        break;
      }
    }

    auto solve_direction = [&](const Blocks& rhs3, Blocks& dX, RVec& dy, Blocks& dZ) {
      Blocks wrw(sides);
      for (std::size_t blk = 0; blk < nblocks; ++blk)
        wrw.m[blk] = wmat[blk] * Rd.m[blk] * wmat[blk];
      RVec rhs = rp + apply_A(wrw) - apply_A(rhs3);
      dy = schur_fac.solve(rhs);
      Blocks atdy = apply_At(dy);
      for (std::size_t blk = 0; blk < nblocks; ++blk) {
        dZ.m[blk] = Rd.m[blk] - atdy.m[blk];
        dX.m[blk] = rhs3.m[blk] - wmat[blk] * dZ.m[blk] * wmat[blk];
      }
      dX.symmetrize();
      dZ.symmetrize();
    };

    auto max_step = [&](const Blocks& base, const Blocks& dir) {
      double alpha = 1e30;
      for (std::size_t blk = 0; blk < nblocks; ++blk) {
        Eigen::LLT<RMat> llt(base.m[blk]);
        if (llt.info() != Eigen::Success) return 0.0;
        const RMat L = llt.matrixL();
        const RMat t = L.triangularView<Eigen::Lower>().solve(dir.m[blk]);
        RMat s = L.triangularView<Eigen::Lower>().solve(RMat(t.transpose()));
        Eigen::SelfAdjointEigenSolver<RMat> es(RMat(0.5 * (s + s.transpose())),
                                               Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
      }
      return std::min(alpha, 1e30);
    };

    // Predictor (affine scaling) direction.
    Blocks rhs3(sides), dXa(sides), dZa(sides);
    RVec dya;
    for (std::size_t blk = 0; blk < nblocks; ++blk) rhs3.m[blk] = -X.m[blk];
    solve_direction(rhs3, dXa, dya, dZa);
    double ap = std::min(1.0, opts.step_fraction * max_step(X, dXa));
    double ad = std::min(1.0, opts.step_fraction * max_step(Z, dZa));
    double mu_aff = 0;
    {
      Blocks xa = X, za = Z;
      for (std::size_t blk = 0; blk < nblocks; ++blk) {
        xa.m[blk] += ap * dXa.m[blk];
        za.m[blk] += ad * dZa.m[blk];
      }
      mu_aff = xa.dot(za) / nsum;
    }
    double sigma = std::pow(std::max(0.0, std::min(1.0, mu_aff / mu)), 3.0);

    // Corrector: in the scaled space the target is
    //   sigma mu I - Lam^2 - sym(dX~ dZ~), divided entrywise by the NT
    //   eigenvalue means, then mapped back through R.
    Blocks dX(sides), dZ(sides);
    RVec dy;
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
      const RMat dxs = rinv[blk] * dXa.m[blk] * rinv[blk].transpose();
      const RMat dzs = rfac[blk].transpose() * dZa.m[blk] * rfac[blk];
      RMat t = -(dxs * dzs);
      t = 0.5 * (t + t.transpose()).eval();
      const RVec& lam = lams[blk];
      for (Index i = 0; i < t.rows(); ++i) {
        for (Index j = 0; j < t.cols(); ++j) {
          double num = t(i, j);
          if (i == j) num += sigma * mu - lam(i) * lam(i);
          t(i, j) = 2.0 * num / (lam(i) + lam(j));
        }
      }
      rhs3.m[blk] = rfac[blk] * t * rfac[blk].transpose();
      rhs3.m[blk] = 0.5 * (rhs3.m[blk] + rhs3.m[blk].transpose()).eval();
    }
    solve_direction(rhs3, dX, dy, dZ);

    ap = std::min(1.0, opts.step_fraction * max_step(X, dX));
    ad = std::min(1.0, opts.step_fraction * max_step(Z, dZ));
    if (ap < 1e-10 && ad < 1e-10) {
      status = SdpStatus::NumericalFailure;
      message = "step length collapsed";
      break;
    }
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
      X.m[blk] += ap * dX.m[blk];
      Z.m[blk] += ad * dZ.m[blk];
    }
    y += ad * dy;
    X.symmetrize();
    Z.symmetrize();
  }

  sol.status = status;
  sol.iterations = iter;
  sol.message = sol.message.empty() ? message : sol.message + message;
  sol.primal_value = sign * pobj;
  sol.dual_value = sign * dobj;
  sol.gap = std::abs(pobj - dobj);
  sol.primal_residual = pres;
  sol.dual_residual = dres;
  for (std::size_t blk = 0; blk < nblocks; ++blk)
    sol.block_values.push_back(unembed(X.m[blk]));
  sol.dual_multipliers.assign(m_orig, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double yi = sign * y(Index(i)) / pre.scales[i];
    sol.dual_multipliers[std::size_t(pre.kept_original[i])] = yi;
  }
  return sol;
}

}  // namespace procmat

#endif  // PROCMAT_SDP_HPP
