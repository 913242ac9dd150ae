#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "dchoice/data.hpp"
#include "dchoice/likelihood.hpp"
#include "dchoice/model.hpp"

namespace dchoice {

struct FitOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;  // on the sup-norm of the score
  double step_tolerance = 1e-10;     // stall detection on the sup-norm of the step
  double ridge_start = 1e-6;
  double ridge_growth = 10.0;
  int max_halvings = 30;
  // |beta_l| beyond this while the likelihood still climbs is reported as
  // separation.
  double separation_bound = 30.0;
  bool verbose = false;

  void validate() const;
};

struct FitResult {
  ModelSpec spec;
  ParamVector params;
  Eigen::VectorXd se;    // (beta, delta) order
  Eigen::MatrixXd vcov;  // inverse of the negative Hessian at the optimum

  // gamma_2..gamma_{J-1} and their delta-method standard errors.
  Eigen::VectorXd cutpoints;
  Eigen::VectorXd cutpoint_se;

  Eigen::Index observations = 0;
  double loglik_fit = 0.0;
  double loglik_0 = 0.0;
  double lr_stat = 0.0;
  int lr_df = 0;
  double lr_pvalue = 1.0;
  double mcfadden_r2 = 0.0;
  double hit_rate = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  std::size_t clamp_count = 0;
  std::string message;
};

// Maximum likelihood by Newton-Raphson. Non-concave points get a ridge
// (tau = ridge_start, ridge_start * growth, ...); rejected steps are halved up
// to max_halvings times; if that stalls the BHHH outer-product matrix is used
// instead. Every accepted iterate has a log-likelihood no lower than the last.
//
// Throws EstimationError if a category never occurs or n <= k + J - 2 and
// SeparationError when a coefficient runs away. Non-convergence is reported
// through FitResult::converged.
FitResult fit_ml(const ModelSpec& spec, const Dataset& data, const FitOptions& opts = {});

// Same model with the design reduced to a single intercept column.
FitResult fit_intercept_only(const ModelSpec& spec, const Dataset& data,
                             const FitOptions& opts = {});

struct LrTest {
  double statistic = 0.0;
  double pvalue = 1.0;
};

// -2 (lnL0 - lnLfit) against a chi-square with `df` degrees of freedom.
LrTest lr_test(double loglik_0, double loglik_fit, int df);

// 1 - lnLfit / lnL0.
double mcfadden_r2(double loglik_0, double loglik_fit);

// Percentage of observations whose observed category has the largest
// predicted probability (ties go to the lowest category).
double hit_rate(const ModelSpec& spec, const ParamVector& params, const Dataset& data);

// n x J cell probabilities for a new design.
Eigen::MatrixXd predict_prob(const ModelSpec& spec, const ParamVector& params,
                             const Eigen::MatrixXd& x_new);

// Starting point: zero slopes, intercept and log-spacings from link quantiles
// of the empirical cumulative shares.
ParamVector starting_values(const ModelSpec& spec, const Dataset& data);

}  // namespace dchoice
