#include "dchoice/likelihood.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dchoice/errors.hpp"

namespace dchoice {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 - exp(d)) for d < 0.
double log1m_exp(double d) {
  return d > -0.6931471805599453 ? std::log(-std::expm1(d)) : std::log1p(-std::exp(d));
}

void check_dimensions(const ModelSpec& spec, const ParamVector& params, const Dataset& data) {
  spec.validate();
  if (data.categories() != spec.categories) {
    throw DomainError("data has " + std::to_string(data.categories()) + " categories, model " +
                      std::to_string(spec.categories));
  }
  if (data.cols() != spec.covariates) {
    throw DomainError("data has " + std::to_string(data.cols()) + " columns, model " +
                      std::to_string(spec.covariates));
  }
  if (params.beta.size() != spec.covariates || params.delta.size() != spec.free_cutpoints()) {
    throw DomainError("parameter vector does not match the model dimensions");
  }
  if (!params.beta.allFinite() || !params.delta.allFinite()) {
    throw DomainError("parameter vector has non-finite entries");
  }
}

}  // namespace

Eigen::VectorXd cutpoints_from_delta(const Eigen::VectorXd& delta) {
  const Eigen::Index m = delta.size();
  Eigen::VectorXd gamma(m + 3);
  gamma[0] = -kInf;
  gamma[1] = 0.0;
  for (Eigen::Index d = 0; d < m; ++d) gamma[d + 2] = gamma[d + 1] + std::exp(delta[d]);
  gamma[m + 2] = kInf;
  return gamma;
}

double interval_logprob(Link link, double lower, double upper, std::size_t* clamps) {
  double logp;
  if (!(lower < upper)) {
    logp = -kInf;
  } else if (std::isinf(lower) && std::isinf(upper)) {
    logp = 0.0;
  } else if (std::isinf(upper)) {
    logp = link_log_cdf(link, -lower);
  } else if (std::isinf(lower)) {
    logp = link_log_cdf(link, upper);
  } else if (lower >= 0.0) {
    // Both in the upper tail: difference of survival functions.
    const double hi = link_log_cdf(link, -lower);
    logp = hi + log1m_exp(link_log_cdf(link, -upper) - hi);
  } else if (upper <= 0.0) {
    const double hi = link_log_cdf(link, upper);
    logp = hi + log1m_exp(link_log_cdf(link, lower) - hi);
  } else {
    // Straddles zero: both excluded tails are at most 1/2.
    logp = std::log1p(-(link_cdf(link, lower) + link_cdf(link, -upper)));
  }
  if (!(logp >= kLogProbFloor)) {
    if (clamps) ++*clamps;
    return kLogProbFloor;
  }
  return logp;
}

double cell_logprob(const ModelSpec& spec, double xb, int j, const Eigen::VectorXd& gamma,
                    std::size_t* clamps) {
  if (j < 1 || j > spec.categories) throw DomainError("cell_logprob: category out of range");
  if (gamma.size() != spec.categories + 1) throw DomainError("cell_logprob: gamma has wrong length");
  return interval_logprob(spec.link, gamma[j - 1] - xb, gamma[j] - xb, clamps);
}

Eigen::RowVectorXd cell_probs(Link link, double xb, const Eigen::VectorXd& gamma) {
  const Eigen::Index J = gamma.size() - 1;
  Eigen::RowVectorXd p(J);
  for (Eigen::Index j = 0; j < J; ++j) {
    p[j] = std::exp(interval_logprob(link, gamma[j] - xb, gamma[j + 1] - xb));
  }
  return p;
}

LoglikEval evaluate_loglik(const ModelSpec& spec, const ParamVector& params, const Dataset& data,
                           Derivatives level, bool with_opg) {
  check_dimensions(spec, params, data);
  const Eigen::Index n = data.rows();
  const Eigen::Index k = spec.covariates;
  const Eigen::Index m = spec.free_cutpoints();
  const int J = spec.categories;
  const Link link = spec.link;
  const auto& X = data.x();
  const auto& y = data.y();

  const Eigen::VectorXd gamma = cutpoints_from_delta(params.delta);
  const Eigen::VectorXd spacing = params.delta.array().exp();
  const Eigen::VectorXd eta = X * params.beta;

  const bool want_grad = level != Derivatives::none || with_opg;
  const bool want_hess = level == Derivatives::hessian;

  LoglikEval out;
  Eigen::VectorXd score_beta_weight(want_grad ? n : 0);  // d logp_i / d eta_i
  Eigen::VectorXd hess_beta_weight(want_hess ? n : 0);   // d2 logp_i / d eta_i^2
  Eigen::MatrixXd cross(want_hess ? n : 0, m);           // d2 logp_i / d eta_i d delta
  Eigen::MatrixXd delta_scores(with_opg ? n : 0, m);
  Eigen::VectorXd grad_delta = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd hess_delta = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd ga(m), gb(m);

  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = y[static_cast<std::size_t>(i)];
    const double a = gamma[j] - eta[i];
    const double b = gamma[j - 1] - eta[i];
    const double logp = interval_logprob(link, b, a, &out.clamp_count);
    total += logp;
    if (!want_grad) continue;

    const bool a_finite = std::isfinite(a);
    const bool b_finite = std::isfinite(b);
    const double ra = a_finite ? std::exp(link_log_pdf(link, a) - logp) : 0.0;
    const double rb = b_finite ? std::exp(link_log_pdf(link, b) - logp) : 0.0;
    // d logp / da = ra, d logp / db = -rb; a and b both move by -1 per unit eta.
    score_beta_weight[i] = rb - ra;

    // Cut-point sensitivities: d gamma_t / d delta_d = exp(delta_d) for d <= t - 2.
    for (Eigen::Index d = 0; d < m; ++d) {
      ga[d] = (j <= J - 1 && d <= j - 2) ? spacing[d] : 0.0;
      gb[d] = d <= j - 3 ? spacing[d] : 0.0;
    }
    const Eigen::VectorXd g_delta = ra * ga - rb * gb;
    grad_delta += g_delta;
    if (with_opg) delta_scores.row(i) = g_delta.transpose();

    if (!want_hess) continue;
    const double haa = a_finite ? ra * link_pdf_slope(link, a) - ra * ra : 0.0;
    const double hbb = b_finite ? -rb * link_pdf_slope(link, b) - rb * rb : 0.0;
    const double hab = ra * rb;
    hess_beta_weight[i] = haa + hbb + 2.0 * hab;
    cross.row(i) = -(haa * ga + hbb * gb + hab * (ga + gb)).transpose();
    hess_delta.noalias() += haa * ga * ga.transpose() + hbb * gb * gb.transpose() +
                            hab * (ga * gb.transpose() + gb * ga.transpose());
    // gamma is a sum of exponentials, so its Hessian in delta is diagonal.
    hess_delta.diagonal() += g_delta;
  }
  out.value = total;
  if (!want_grad) return out;

  out.gradient.resize(k + m);
  out.gradient.head(k) = X.transpose() * score_beta_weight;
  out.gradient.tail(m) = grad_delta;

  if (want_hess) {
    Eigen::MatrixXd H(k + m, k + m);
    H.topLeftCorner(k, k) = X.transpose() * hess_beta_weight.asDiagonal() * X;
    H.topRightCorner(k, m) = X.transpose() * cross;
    H.bottomLeftCorner(m, k) = H.topRightCorner(k, m).transpose();
    H.bottomRightCorner(m, m) = hess_delta;
    out.hessian = 0.5 * (H + H.transpose());
  }
  if (with_opg) {
    Eigen::MatrixXd S(n, k + m);
    S.leftCols(k) = X.array().colwise() * score_beta_weight.array();
    S.rightCols(m) = delta_scores;
    out.opg = S.transpose() * S;
  }
  return out;
}

double loglik(const ModelSpec& spec, const ParamVector& params, const Dataset& data) {
  return evaluate_loglik(spec, params, data, Derivatives::none).value;
}

Eigen::VectorXd grad_loglik(const ModelSpec& spec, const ParamVector& params, const Dataset& data) {
  return evaluate_loglik(spec, params, data, Derivatives::gradient).gradient;
}

Eigen::MatrixXd hess_loglik(const ModelSpec& spec, const ParamVector& params, const Dataset& data) {
  return evaluate_loglik(spec, params, data, Derivatives::hessian).hessian;
}

}  // namespace dchoice
