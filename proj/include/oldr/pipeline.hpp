#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "oldr/discretizer.hpp"
#include "oldr/paft.hpp"
#include "oldr/triilp.hpp"
#include "oldr/validator.hpp"

namespace oldr {

enum class Method { triilp, triilp_split, paft, isag };

struct MethodSpec {
  Method method = Method::triilp;
  int split_k = 2;  // triilp_split only
};

/// Accepts "triilp", "paft", "isag", "triilp-split-k" (k = 2) and "triilp-split-<k>".
inline MethodSpec parse_method(const std::string& s) {
  if (s == "triilp") return {Method::triilp, 1};
  if (s == "paft") return {Method::paft, 1};
  if (s == "isag") return {Method::isag, 1};
  const std::string prefix = "triilp-split-";
  if (s.rfind(prefix, 0) == 0) {
    const std::string rest = s.substr(prefix.size());
    if (rest == "k") return {Method::triilp_split, 2};
    try {
      std::size_t used = 0;
      const int k = std::stoi(rest, &used);
      if (used == rest.size() && k >= 2) return {Method::triilp_split, k};
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorKind::bounds, "unknown method '" + s + "'");
}

inline std::string method_name(const MethodSpec& m) {
  switch (m.method) {
    case Method::triilp: return "triilp";
    case Method::triilp_split: return "triilp-split-" + std::to_string(m.split_k);
    case Method::paft: return "paft";
    case Method::isag: return "isag";
  }
  return "?";
}

struct PipelineResult {
  Discretization discretization;
  DiscretePlan plan;
  ContinuousPlan continuous;
  ValidationReport validation;
  int makespan = 0;       // grid steps
  int underestimate = 0;  // steps
  double ratio = 1.0;
  double plan_time = 0.0;  // seconds spent in the planner
};

/// Discretize, plan, synthesize and validate. Throws inadmissible on
/// separation failures and validation when the synthesized plan is unsafe.
inline PipelineResult run_pipeline(const ContinuousInstance& inst, const MethodSpec& method,
                                   const Backend& backend = {}) {
  const auto sep = validate_separation(inst);
  if (!sep.ok()) throw Error(ErrorKind::inadmissible, "instance violates separation or bounds");
  auto grid = std::make_shared<const TriGrid>(build_grid(inst.workspace));
  PipelineResult out;
  out.discretization = discretize(inst, grid);
  const auto& dinst = out.discretization.instance;
  out.underestimate = underestimated_makespan(dinst);
  const auto t0 = std::chrono::steady_clock::now();
  TriIlpOptions opt;
  opt.backend = backend;
  switch (method.method) {
    case Method::triilp: out.plan = solve_triilp(dinst, opt).plan; break;
    case Method::triilp_split: out.plan = solve_split(dinst, method.split_k, opt).plan; break;
    case Method::paft: out.plan = paft(dinst).plan; break;
    case Method::isag: out.plan = isag(dinst); break;
  }
  out.plan_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.makespan = out.plan.makespan();
  out.ratio = out.underestimate == 0 ? 1.0 : static_cast<double>(out.makespan) / out.underestimate;
  out.continuous = synthesize(inst, out.discretization, out.plan);
  out.validation = validate(out.continuous, inst.workspace, &inst.starts, &inst.goals);
  if (!out.validation.valid()) throw Error(ErrorKind::validation, "plan fails validation: " + out.validation.first_problem);
  return out;
}

}  // namespace oldr
