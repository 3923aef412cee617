// SPDX-License-Identifier: Apache-2.0
//
// Codebook construction: conjugate beamforming, the proposed wideband
// design (alternating relaxed solves with projection onto the realizable
// set), and the narrowband baselines that constrain coverage only at the
// center subcarrier.

#ifndef SQUINTBOOK_DESIGN_HPP
#define SQUINTBOOK_DESIGN_HPP

#include <string>
#include <utility>
#include <vector>

#include "squintbook/array.hpp"
#include "squintbook/channel.hpp"
#include "squintbook/quantize.hpp"
#include "squintbook/solver.hpp"

namespace squintbook {

enum class CodebookLabel { Proposed, CBF, NarrowbandLS, NarrowbandLSWideObj };

inline std::string to_string(CodebookLabel label) {
  switch (label) {
    case CodebookLabel::Proposed: return "proposed";
    case CodebookLabel::CBF: return "cbf";
    case CodebookLabel::NarrowbandLS: return "narrowband";
    case CodebookLabel::NarrowbandLSWideObj: return "narrowband-wb";
  }
  return "unknown";
}

/// A designed codebook: one realizable beam per coverage direction.
struct Codebook {
  CMatrix weights;  // N x M, every entry in the realizable set
  CoverageGrid grid{std::vector<Direction>{Direction{}}};
  QuantizationSpec spec{1, 0, 0.5};
  CodebookLabel label = CodebookLabel::CBF;
  double sigma2 = 0.0;
  int iterations = 0;
};

/// Everything a design run needs. sigma2 values are linear.
struct DesignScenario {
  ArrayGeometry tx_geom;
  ArrayGeometry rx_geom;
  CoverageGrid tx_grid;
  CoverageGrid rx_grid;
  SubcarrierGrid subcarriers;
  ChannelTensor channel;
  QuantizationSpec spec;
  double sigma2_tx = 0.1;
  double sigma2_rx = 0.1;
  int outer_rounds = 1;
  SolverConfig solver;
};

/// Per-round record of the alternating minimization.
struct DesignRoundTrace {
  double f_objective_pre_projection = 0.0;
  double f_objective_post_projection = 0.0;
  double f_max_violation_pre = 0.0;
  double f_max_violation_post = 0.0;
  double w_objective_pre_projection = 0.0;
  double w_objective_post_projection = 0.0;
  double w_max_violation_pre = 0.0;
  double w_max_violation_post = 0.0;
  bool f_converged = false;
  bool w_converged = false;
};

struct DesignResult {
  Codebook tx;
  Codebook rx;
  std::vector<DesignRoundTrace> trace;
};

/// Direct evaluation of the wideband coupling objective
/// sum_k ||W^* H[k] F||_F^2.
inline double wideband_objective(const ChannelTensor& channel, const CMatrix& F,
                                 const CMatrix& W) {
  double obj = 0.0;
  for (const auto& H : channel.entries) obj += (W.adjoint() * H * F).squaredNorm();
  return obj;
}

namespace detail {

inline std::vector<CMatrix> steering_per_subcarrier(const ArrayGeometry& geom,
                                                    const CoverageGrid& grid,
                                                    const SubcarrierGrid& sc) {
  std::vector<CMatrix> out;
  out.reserve(sc.num_subcarriers());
  for (int k = 0; k < sc.num_subcarriers(); ++k)
    out.push_back(steering_matrix(geom, grid, sc.frequency(k)));
  return out;
}

inline CoverageConstraintSet make_constraints(std::vector<CMatrix> steering,
                                              int n, double sigma2, int m) {
  CoverageConstraintSet cons;
  cons.steering = std::move(steering);
  cons.target_gain = static_cast<double>(n);
  cons.variance_budget = sigma2;
  cons.num_beams = m;
  return cons;
}

inline double max_violation(const CoverageConstraintSet& cons, const CMatrix& X) {
  double v = 0.0;
  for (std::size_t k = 0; k < cons.steering.size(); ++k)
    v = std::max(v, cons.value(static_cast<int>(k), X) - cons.rhs());
  return std::max(v, 0.0) / cons.scale();
}

}  // namespace detail

/// Conjugate beamforming: quantized center-frequency steering vectors.
inline std::pair<Codebook, Codebook> design_cbf(const DesignScenario& scenario) {
  const double fc = scenario.subcarriers.frequency(scenario.subcarriers.center_index());
  Codebook tx{project_matrix(scenario.spec,
                             steering_matrix(scenario.tx_geom, scenario.tx_grid, fc)),
              scenario.tx_grid, scenario.spec, CodebookLabel::CBF, 0.0, 0};
  Codebook rx{project_matrix(scenario.spec,
                             steering_matrix(scenario.rx_geom, scenario.rx_grid, fc)),
              scenario.rx_grid, scenario.spec, CodebookLabel::CBF, 0.0, 0};
  return {std::move(tx), std::move(rx)};
}

namespace detail {

/// Shared alternating-minimization pipeline. When narrowband_constraints is
/// set, coverage is constrained only at the center subcarrier; when
/// narrowband_objective is set, only H[k0] enters the coupling objective.
/// relax disables projection onto the quantized set (test instrumentation).
inline DesignResult design_alternating(const DesignScenario& s,
                                       CodebookLabel label,
                                       bool narrowband_objective,
                                       bool narrowband_constraints,
                                       bool relax = false) {
  const int k0 = s.subcarriers.center_index();
  const int nt = s.tx_geom.size();
  const int nr = s.rx_geom.size();

  const ChannelTensor* obj_channel = &s.channel;
  ChannelTensor narrow;
  if (narrowband_objective) {
    narrow.grid = s.subcarriers;
    narrow.entries = {s.channel.entries[k0]};
    narrow.normalized = false;
    obj_channel = &narrow;
  }

  auto tx_steering = steering_per_subcarrier(s.tx_geom, s.tx_grid, s.subcarriers);
  auto rx_steering = steering_per_subcarrier(s.rx_geom, s.rx_grid, s.subcarriers);
  const CMatrix a_tx0 = tx_steering[k0];
  const CMatrix a_rx0 = rx_steering[k0];
  if (narrowband_constraints) {
    tx_steering = {a_tx0};
    rx_steering = {a_rx0};
  }
  auto cons_f = make_constraints(std::move(tx_steering), nt, s.sigma2_tx,
                                 s.tx_grid.size());
  auto cons_w = make_constraints(std::move(rx_steering), nr, s.sigma2_rx,
                                 s.rx_grid.size());

  auto realize = [&](const CMatrix& X) {
    return relax ? box_project(X) : project_matrix(s.spec, X);
  };

  CMatrix W = realize(a_rx0);
  CMatrix F = realize(a_tx0);  // warm start for the first F solve

  DesignResult result;
  for (int round = 0; round < s.outer_rounds; ++round) {
    DesignRoundTrace t;

    const QuadraticForm form_f =
        build_quadratic_form(*obj_channel, W, FormSide::ForF);
    const SolveReport rep_f = solve_subproblem(form_f, cons_f, s.solver, F);
    if (rep_f.infeasible_budget)
      throw std::runtime_error("design: infeasible coverage budget for F (round " +
                               std::to_string(round) + ")");
    t.f_objective_pre_projection = rep_f.objective;
    t.f_max_violation_pre = rep_f.max_violation;
    t.f_converged = rep_f.converged;
    F = realize(rep_f.solution);
    t.f_objective_post_projection = form_f.objective(F);
    t.f_max_violation_post = max_violation(cons_f, F);

    const QuadraticForm form_w =
        build_quadratic_form(*obj_channel, F, FormSide::ForW);
    const SolveReport rep_w = solve_subproblem(form_w, cons_w, s.solver, W);
    if (rep_w.infeasible_budget)
      throw std::runtime_error("design: infeasible coverage budget for W (round " +
                               std::to_string(round) + ")");
    t.w_objective_pre_projection = rep_w.objective;
    t.w_max_violation_pre = rep_w.max_violation;
    t.w_converged = rep_w.converged;
    W = realize(rep_w.solution);
    t.w_objective_post_projection = form_w.objective(W);
    t.w_max_violation_post = max_violation(cons_w, W);

    result.trace.push_back(t);
  }

  result.tx = Codebook{F, s.tx_grid, s.spec, label, s.sigma2_tx, s.outer_rounds};
  result.rx = Codebook{W, s.rx_grid, s.spec, label, s.sigma2_rx, s.outer_rounds};
  return result;
}

}  // namespace detail

/// The proposed wideband design: objective and coverage constraints span all
/// K subcarriers.
inline DesignResult design_proposed(const DesignScenario& scenario,
                                    bool relax = false) {
  return detail::design_alternating(scenario, CodebookLabel::Proposed,
                                    /*narrowband_objective=*/false,
                                    /*narrowband_constraints=*/false, relax);
}

/// Narrowband baselines. wide_objective=false uses only H[k0] in the
/// objective; both variants constrain coverage only at the center subcarrier.
inline DesignResult design_narrowband(const DesignScenario& scenario,
                                      bool wide_objective, bool relax = false) {
  return detail::design_alternating(
      scenario,
      wide_objective ? CodebookLabel::NarrowbandLSWideObj
                     : CodebookLabel::NarrowbandLS,
      /*narrowband_objective=*/!wide_objective,
      /*narrowband_constraints=*/true, relax);
}

}  // namespace squintbook

#endif  // SQUINTBOOK_DESIGN_HPP
