#include "dchoice/effects.hpp"

#include <cmath>
#include <sstream>

#include "dchoice/errors.hpp"
#include "dchoice/estimation.hpp"
#include "dchoice/likelihood.hpp"

namespace dchoice {

namespace {

void check_column(const ModelSpec& spec, const ParamVector& params, const Dataset& data,
                  Eigen::Index column) {
  spec.validate();
  if (data.cols() != spec.covariates || params.beta.size() != spec.covariates ||
      params.delta.size() != spec.free_cutpoints() || data.categories() != spec.categories) {
    throw DomainError("effects: model, parameters and data disagree on dimensions");
  }
  if (column < 0 || column >= data.cols()) throw DomainError("effects: column index out of range");
  if (data.kinds()[static_cast<std::size_t>(column)] == ColumnKind::intercept) {
    throw KindError("effects are not defined for the intercept");
  }
}

double pdf_or_zero(Link link, double w) { return std::isfinite(w) ? link_pdf(link, w) : 0.0; }

CovariateEffect finish(Eigen::MatrixXd per_obs) {
  CovariateEffect out;
  out.average = per_obs.rows() > 0 ? Eigen::RowVectorXd(per_obs.colwise().mean())
                                   : Eigen::RowVectorXd::Zero(per_obs.cols());
  out.per_observation = std::move(per_obs);
  return out;
}

}  // namespace

CovariateEffect ce_continuous(const ModelSpec& spec, const ParamVector& params,
                              const Dataset& data, Eigen::Index column) {
  check_column(spec, params, data, column);
  if (data.kinds()[static_cast<std::size_t>(column)] == ColumnKind::indicator) {
    throw KindError("column '" + data.names()[static_cast<std::size_t>(column)] +
                    "' is an indicator; use the discrete-change effect");
  }
  const Eigen::VectorXd gamma = cutpoints_from_delta(params.delta);
  const Eigen::VectorXd eta = data.x() * params.beta;
  const double b = params.beta[column];

  Eigen::MatrixXd effect(data.rows(), spec.categories);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (int j = 1; j <= spec.categories; ++j) {
      effect(i, j - 1) =
          -b * (pdf_or_zero(spec.link, gamma[j] - eta[i]) - pdf_or_zero(spec.link, gamma[j - 1] - eta[i]));
    }
  }
  return finish(std::move(effect));
}

CovariateEffect ce_indicator(const ModelSpec& spec, const ParamVector& params,
                             const Dataset& data, Eigen::Index column) {
  check_column(spec, params, data, column);
  const auto x_col = data.x().col(column);
  if (((x_col.array() != 0.0) && (x_col.array() != 1.0)).any()) {
    throw KindError("column '" + data.names()[static_cast<std::size_t>(column)] +
                    "' is not 0/1 valued; use the marginal effect");
  }
  Eigen::MatrixXd on = data.x(), off = data.x();
  on.col(column).setOnes();
  off.col(column).setZero();
  return finish(predict_prob(spec, params, on) - predict_prob(spec, params, off));
}

double odds_ratio_logit(const ModelSpec& spec, const ParamVector& params, Eigen::Index column) {
  if (spec.link != Link::logit) {
    throw DomainError("odds ratios are only defined here for the logit link");
  }
  if (spec.family != Family::binary) throw DomainError("odds_ratio_logit needs a binary model");
  if (column < 0 || column >= params.beta.size()) throw DomainError("column index out of range");
  return std::exp(params.beta[column]);
}

double cumulative_odds(const ModelSpec& spec, const ParamVector& params, const Eigen::VectorXd& x,
                       int j) {
  if (spec.link != Link::logit) throw DomainError("cumulative odds need the logit link");
  if (j < 1 || j >= spec.categories) {
    throw DomainError("cumulative_odds: j must lie in 1..J-1 (P(y <= J) = 1)");
  }
  if (x.size() != params.beta.size()) throw DomainError("cumulative_odds: x has wrong length");
  const Eigen::VectorXd gamma = cutpoints_from_delta(params.delta);
  return std::exp(gamma[j] - x.dot(params.beta));
}

EffectsTable effects_table(const ModelSpec& spec, const ParamVector& params, const Dataset& data,
                           const std::vector<EffectRequest>& requests,
                           const std::vector<std::string>& category_labels) {
  EffectsTable table;
  table.categories = category_labels;
  for (const auto& req : requests) {
    check_column(spec, params, data, req.column);
    const auto idx = static_cast<std::size_t>(req.column);
    EffectsRow row;
    row.name = data.names()[idx];
    row.kind = data.kinds()[idx] == ColumnKind::indicator ? EffectKind::indicator
                                                          : EffectKind::continuous;
    row.log_scale = data.kinds()[idx] == ColumnKind::log_continuous;
    if (row.kind == EffectKind::indicator) {
      row.average = ce_indicator(spec, params, data, req.column).average;
    } else {
      row.scale = req.scale;
      row.average = req.scale * ce_continuous(spec, params, data, req.column).average;
    }
    row.label = row.name;
    if (row.scale != 1.0) {
      std::ostringstream s;
      s << row.name << ", " << row.scale << " units";
      row.label = s.str();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace dchoice
