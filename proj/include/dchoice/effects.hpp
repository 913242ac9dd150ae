#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dchoice/data.hpp"
#include "dchoice/model.hpp"

namespace dchoice {

// Per-observation change in each category probability (n x J) and its
// sample average (1 x J).
struct CovariateEffect {
  Eigen::MatrixXd per_observation;
  Eigen::RowVectorXd average;
};

// Marginal effect of a continuous covariate:
//   dP(y_i = j)/dx_il = -beta_l [f(gamma_j - x_i'beta) - f(gamma_{j-1} - x_i'beta)].
// Throws KindError for the intercept or an indicator column.
CovariateEffect ce_continuous(const ModelSpec& spec, const ParamVector& params,
                              const Dataset& data, Eigen::Index column);

// Discrete change P(y_i = j | x_im = 1) - P(y_i = j | x_im = 0), other
// covariates held at their observed values, for every observation. Throws
// KindError unless the column is 0/1 valued (and not the intercept).
CovariateEffect ce_indicator(const ModelSpec& spec, const ParamVector& params,
                             const Dataset& data, Eigen::Index column);

// exp(beta_m). Binary logit only.
double odds_ratio_logit(const ModelSpec& spec, const ParamVector& params, Eigen::Index column);

// Odds of y <= j at covariate vector x: exp(gamma_j - x'beta). Logit only,
// 1 <= j <= J - 1.
double cumulative_odds(const ModelSpec& spec, const ParamVector& params,
                       const Eigen::VectorXd& x, int j);

enum class EffectKind { continuous, indicator };

struct EffectsRow {
  std::string name;
  std::string label;  // name plus scale, e.g. "age, 10 units"
  EffectKind kind = EffectKind::continuous;
  bool log_scale = false;
  double scale = 1.0;
  Eigen::RowVectorXd average;  // already multiplied by scale
};

struct EffectsTable {
  std::vector<std::string> categories;
  std::vector<EffectsRow> rows;
};

struct EffectRequest {
  Eigen::Index column = 0;
  double scale = 1.0;
};

// One row per requested column, in request order. Indicator columns get the
// discrete change, everything else the marginal effect times `scale`.
EffectsTable effects_table(const ModelSpec& spec, const ParamVector& params, const Dataset& data,
                           const std::vector<EffectRequest>& requests,
                           const std::vector<std::string>& category_labels);

}  // namespace dchoice
