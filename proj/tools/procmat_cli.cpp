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

#include <iostream>

#include <CLI11.hpp>

#include "procmat/cone_oracle.hpp"
#include "procmat/discrimination.hpp"
#include "procmat/matrix_io.hpp"
#include "procmat/protocols.hpp"

namespace {

using namespace procmat;
using nlohmann::json;

// exit codes: 0 success/valid, 1 semantic failure, 2 input error,
// 3 numerical failure
constexpr int kOk = 0;
constexpr int kSemantic = 1;
constexpr int kInput = 2;
constexpr int kNumerical = 3;

bool g_compact = false;

void emit(const json& j) {
  if (g_compact)
    std::cout << j.dump() << "\n";
  else
    std::cout << j.dump(1) << "\n";
}

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json validity_json(const ValidityReport& rep) {
  return json{{"ok", rep.ok},
              {"psd_residual", rep.psd},
              {"space_residual", rep.space},
              {"trace_residual", rep.trace}};
}

HermitianOperator load_party_operator(const std::string& path) {
  try {
    auto op = load_matrix(path);
    for (const char* n : {kAI, kAO, kBI, kBO})
      if (!op.has(n))
        throw std::invalid_argument("file '" + path + "' must carry labels AI, AO, BI, BO");
    return HermitianOperator(permute_systems(op, {kAI, kAO, kBI, kBO}));
  } catch (const std::exception& e) {
    throw InputError("loading '" + path + "': " + e.what());
  }
}

json dims_json(const LabelledOperator& op) {
  json dims = json::array();
  for (const auto& l : op.labels()) dims.push_back({{"name", l.name}, {"dim", l.dim}});
  return dims;
}

int cmd_validate(const std::string& path, double tol) {
  const auto op = load_party_operator(path);
  const auto rep = validate_def1(op, tol);
  json out;
  out["file"] = path;
  out["dims"] = dims_json(op);
  out["trace"] = op.real_trace();
  out["report"] = validity_json(rep);
  out["valid"] = rep.ok;
  emit(out);
  return rep.ok ? kOk : kSemantic;
}

int cmd_classify(const std::string& path, double tol, double sep_tol) {
  const auto op = load_party_operator(path);
  const auto rep = validate_def1(op, 1e-8);
  json out;
  out["file"] = path;
  out["valid"] = rep.ok;
  out["report"] = validity_json(rep);
  if (!rep.ok) {
    out["class"] = nullptr;
    emit(out);
    return kSemantic;
  }
  ProcessMatrix w(op, 1e-7);
  out["residuals"] = {{"free", free_residual(op)},
                      {"comb_ab", comb_ab_residual(op)},
                      {"comb_ba", comb_ba_residual(op)}};
  const auto sep = distance_to_class(w, ProcessClassTag::Separable);
  out["separable_distance"] = sep.distance;
  ProcessClassTag tag = ProcessClassTag::Unclassified;
  if (free_residual(op) <= tol)
    tag = ProcessClassTag::Free;
  else if (comb_ab_residual(op) <= tol)
    tag = ProcessClassTag::CombAB;
  else if (comb_ba_residual(op) <= tol)
    tag = ProcessClassTag::CombBA;
  else if (sep.distance <= sep_tol)
    tag = ProcessClassTag::Separable;
  out["class"] = to_string(tag);
  emit(out);
  return kOk;
}

int cmd_psucc(const std::string& path0, const std::string& path1, bool adaptive, bool realize,
              bool force, double tol) {
  const auto op0 = load_party_operator(path0);
  const auto op1 = load_party_operator(path1);
  for (const char* n : {kAI, kAO, kBI, kBO})
    if (op0.dim_of(n) != op1.dim_of(n)) {
      emit(json{{"error", "dimension mismatch between operands"}});
      return kSemantic;
    }
  const double ptol = force ? 1e-3 : 1e-7;
  ProcessMatrix w0(op0, ptol), w1(op1, ptol);

  auto res = p_succ(w0, w1);
  json out;
  out["p_succ"] = res.p_succ;
  out["gap"] = res.gap;
  out["constraint_residual"] = res.constraint_residual;
  out["iterations"] = res.iterations;
  out["certificate"] = {{"alpha", res.certificate.alpha},
                        {"dual_residual",
                         res.certificate.feasibility_residual(w0.op(), w1.op())}};
  save_matrix(res.strategy.s0, "psucc_s0.json");
  save_matrix(res.strategy.s1, "psucc_s1.json");
  out["strategy_files"] = {"psucc_s0.json", "psucc_s1.json"};

  if (adaptive) {
    if (comb_ab_residual(op0) > 1e-7 || comb_ab_residual(op1) > 1e-7) {
      out["p_adapt"] = nullptr;
      out["p_adapt_note"] = "operands are not combs over A<B";
    } else {
      auto ad = p_adapt(w0, w1);
      out["p_adapt"] = ad.p_adapt;
      out["p_adapt_gap"] = ad.gap;
    }
  }
  if (realize) {
    auto n = HermitianOperator(op0.labels(),
                               CMat(res.strategy.s0.matrix() + res.strategy.s1.matrix()));
    auto real = build_realization(n, w0, w1);
    save_matrix(real.k.op, "realization_K.json");
    save_matrix(real.q0, "realization_Q0.json");
    save_matrix(real.q1, "realization_Q1.json");
    out["realization_files"] = {"realization_K.json", "realization_Q0.json",
                                "realization_Q1.json"};
    out["realized_probability"] = real.realized_probability;
  }
  (void)tol;
  emit(out);
  return kOk;
}

int cmd_distance(const std::string& path, const std::string& set_name) {
  const auto op = load_party_operator(path);
  ProcessMatrix w(op, 1e-7);
  ProcessClassTag cls;
  if (set_name == "free")
    cls = ProcessClassTag::Free;
  else if (set_name == "comb-ab")
    cls = ProcessClassTag::CombAB;
  else if (set_name == "comb-ba")
    cls = ProcessClassTag::CombBA;
  else if (set_name == "sep")
    cls = ProcessClassTag::Separable;
  else
    throw CLI::ValidationError("--set must be one of free, comb-ab, comb-ba, sep");

  auto res = distance_to_class(w, cls);
  const auto closest_rep = validate_def1(res.closest.op(), 1e-7);
  save_matrix(res.closest.op(), "closest.json");
  json out;
  out["set"] = set_name;
  out["distance"] = res.distance;
  out["gap"] = res.gap;
  out["constraint_residual"] = res.constraint_residual;
  out["closest_file"] = "closest.json";
  out["closest_valid"] = closest_rep.ok;
  emit(out);
  return kOk;
}

int cmd_basenorm(const std::string& path0, const std::string& path1) {
  auto x = load_party_operator(path0);
  if (!path1.empty()) {
    const auto y = load_party_operator(path1);
    x = HermitianOperator(x.labels(), CMat(x.matrix() - permute_systems(
                                                            y, {kAI, kAO, kBI, kBO})
                                                            .matrix()));
  }
  SdpSolution detail;
  const double bn = base_norm(x, {}, &detail);
  emit(json{{"base_norm", bn}, {"gap", detail.gap}});
  return kOk;
}

int cmd_demo_perfect(Index dim, unsigned long long seed) {
  Rng rng(seed);
  CMat rho = random_density(dim, rng);
  CMat u = haar_unitary(dim, rng);
  auto pp = make_perfect_pair(rho, u);

  json out;
  out["dim"] = dim;
  out["seed"] = seed;
  out["rho"] = matrix_to_json(LabelledOperator({{kAI, dim}}, rho));
  out["u"] = matrix_to_json(LabelledOperator({{kAO, dim}}, u));
  json lambdas = json::array();
  for (Index i = 0; i < dim; ++i) lambdas.push_back(pp.eigenvalues(i));
  out["eigenvalues"] = lambdas;

  auto registers = [dim](const LabelledOperator& sigma) {
    json rows = json::array();
    for (Index a = 0; a < dim; ++a)
      for (Index b = 0; b < dim; ++b) {
        const double pr = sigma.matrix()(a * dim + b, a * dim + b).real();
        if (pr > 1e-12) rows.push_back({{"alice", a}, {"bob", b}, {"p", pr}});
      }
    return rows;
  };
  out["registers_a_before_b"] = registers(simulate_order(pp, CausalOrder::AB));
  out["registers_b_before_a"] = registers(simulate_order(pp, CausalOrder::BA));
  out["probability"] = perfect_probability(pp);
  emit(out);
  return kOk;
}

int cmd_cone_report(int samples, unsigned long long seed, double tol) {
  Rng rng(seed);
  auto rep = verify_dual_base(samples, rng, qubit_party_labels(), tol);
  json out;
  out["samples"] = samples;
  out["seed"] = seed;
  out["max_forward_residual"] = rep.max_forward_residual;
  out["max_marginal_residual"] = rep.max_marginal_residual;
  out["convexity_residual"] = rep.convexity_residual;
  out["falsification_deviation"] = rep.falsification_deviation;
  out["ok"] = rep.ok;
  json rows = json::array();
  for (const auto& s : rep.samples)
    rows.push_back({{"forward", s.forward_residual},
                    {"marginal_a", s.marginal_a},
                    {"marginal_b", s.marginal_b},
                    {"affine", s.affine}});
  out["per_sample"] = rows;
  emit(out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"process matrix validation, discrimination and distance toolkit"};
  app.require_subcommand(1);
  app.add_flag("--json", g_compact, "compact single-line JSON output");

  std::string path, path0, path1, set_name = "free";
  double tol = 1e-8, sep_tol = 1e-6;
  bool adaptive = false, realize = false, force = false;
  Index dim = 2;
  unsigned long long seed = 0;
  int samples = 100;

  auto* validate = app.add_subcommand("validate", "check process-matrix validity");
  validate->add_option("path", path)->required();
  validate->add_option("--tol", tol, "validity tolerance");

  auto* classify = app.add_subcommand("classify", "classify into the causal-structure classes");
  classify->add_option("path", path)->required();
  classify->add_option("--tol", tol, "membership residual tolerance")->default_val(1e-7);
  classify->add_option("--sep-tol", sep_tol, "separable distance tolerance");

  auto* psucc = app.add_subcommand("psucc", "optimal discrimination probability");
  psucc->add_option("path0", path0)->required();
  psucc->add_option("path1", path1)->required();
  psucc->add_flag("--adaptive", adaptive, "also compute the adaptive tester value");
  psucc->add_flag("--realize", realize, "emit the realization channel and measurement");
  psucc->add_flag("--force", force, "skip strict validity checks on inputs");
  psucc->add_option("--tol", tol);

  auto* distance = app.add_subcommand("distance", "distance to a process-matrix class");
  distance->add_option("path", path)->required();
  distance->add_option("--set", set_name, "free | comb-ab | comb-ba | sep")->required();

  auto* basenorm = app.add_subcommand("basenorm", "base norm of an operator (or a difference)");
  basenorm->add_option("path0", path0)->required();
  basenorm->add_option("path1", path1);

  auto* demo = app.add_subcommand("demo-perfect", "perfect discrimination protocol transcript");
  demo->add_option("--dim", dim, "local dimension")->check(CLI::PositiveNumber);
  demo->add_option("--seed", seed);

  auto* cone = app.add_subcommand("cone-report", "sampled dual-base verification report");
  cone->add_option("--samples", samples)->check(CLI::NonNegativeNumber);
  cone->add_option("--seed", seed);
  cone->add_option("--tol", tol, "pairing residual tolerance")->default_val(1e-9);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(path, tol);
    if (classify->parsed()) return cmd_classify(path, tol, sep_tol);
    if (psucc->parsed()) return cmd_psucc(path0, path1, adaptive, realize, force, tol);
    if (distance->parsed()) return cmd_distance(path, set_name);
    if (basenorm->parsed()) return cmd_basenorm(path0, path1);
    if (demo->parsed()) {
      if (dim < 2) {
        emit(nlohmann::json{{"error", "demo-perfect requires --dim >= 2"}});
        return kSemantic;
      }
      return cmd_demo_perfect(dim, seed);
    }
    if (cone->parsed()) return cmd_cone_report(samples, seed, tol);
  } catch (const InputError& e) {
    emit(nlohmann::json{{"error", e.what()}});
    return kInput;
  } catch (const nlohmann::json::exception& e) {
    emit(nlohmann::json{{"error", e.what()}});
    return kInput;
  } catch (const std::invalid_argument& e) {
    emit(nlohmann::json{{"error", e.what()}});
    return kSemantic;
  } catch (const std::domain_error& e) {
    emit(nlohmann::json{{"error", e.what()}});
    return kSemantic;
  } catch (const std::runtime_error& e) {
    emit(nlohmann::json{{"error", e.what()}});
    return kNumerical;
  }
  return kOk;
}
