#include "dchoice/estimation.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "dchoice/errors.hpp"

namespace dchoice {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_fit_inputs(const ModelSpec& spec, const Dataset& data) {
  spec.validate();
  if (data.categories() != spec.categories || data.cols() != spec.covariates) {
    throw DomainError("data dimensions do not match the model specification");
  }
  const auto counts = data.category_counts();
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) {
      throw EstimationError("response category " + std::to_string(j + 1) +
                            " has no observations; every category must occur");
    }
  }
  if (data.rows() <= spec.param_count()) {
    throw EstimationError("need more observations (" + std::to_string(data.rows()) +
                          ") than parameters (" + std::to_string(spec.param_count()) + ")");
  }
}

ParamVector step_from(const ParamVector& p, const Eigen::VectorXd& step) {
  return ParamVector::unpack(p.packed() + step, p.beta.size());
}

// Solve (A + tau I) d = g for the smallest tau in {0, t0, t0*r, ...} that
// makes the matrix positive definite.
Eigen::VectorXd ridge_direction(const Eigen::MatrixXd& neg_hessian, const Eigen::VectorXd& g,
                                const FitOptions& opts) {
  Eigen::LLT<Eigen::MatrixXd> llt(neg_hessian);
  if (llt.info() == Eigen::Success) return llt.solve(g);
  const auto I = Eigen::MatrixXd::Identity(g.size(), g.size());
  for (double tau = opts.ridge_start; tau < 1e30; tau *= opts.ridge_growth) {
    llt.compute(neg_hessian + tau * I);
    if (llt.info() == Eigen::Success) return llt.solve(g);
  }
  return g;  // steepest ascent as a last resort
}

struct Maximum {
  ParamVector params;
  LoglikEval eval;  // with Hessian, at params
  int iterations = 0;
  bool converged = false;
  std::string message;
};

Maximum maximize(const ModelSpec& spec, const Dataset& data, const FitOptions& opts) {
  ParamVector theta = starting_values(spec, data);
  LoglikEval ev = evaluate_loglik(spec, theta, data, Derivatives::hessian);
  if (!std::isfinite(ev.value)) throw EstimationError("log-likelihood not finite at start values");

  Maximum out;
  auto stationary = [&](const LoglikEval& e) {
    return e.gradient.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance &&
           Eigen::LLT<Eigen::MatrixXd>(-e.hessian).info() == Eigen::Success;
  };

  // Halve `direction` until the log-likelihood does not drop. Returns the
  // accepted step, or an empty vector.
  auto line_search = [&](const Eigen::VectorXd& direction, double& new_value) -> Eigen::VectorXd {
    const double slack = 1e-12 * std::max(1.0, std::fabs(ev.value));
    Eigen::VectorXd step = direction;
    for (int h = 0; h <= opts.max_halvings; ++h, step *= 0.5) {
      if (!step.allFinite()) continue;
      const double value = loglik(spec, step_from(theta, step), data);
      if (std::isfinite(value) && value >= ev.value - slack) {
        new_value = value;
        return step;
      }
    }
    return {};
  };

  bool stalled = false;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (stationary(ev)) break;

    double new_value = 0.0;
    Eigen::VectorXd step = line_search(ridge_direction(-ev.hessian, ev.gradient, opts), new_value);
    if (step.size() == 0) {
      const auto opg = evaluate_loglik(spec, theta, data, Derivatives::gradient, true).opg;
      step = line_search(ridge_direction(opg, ev.gradient, opts), new_value);
    }
    if (step.size() == 0) {
      out.message = "line search failed to improve the log-likelihood";
      stalled = true;
      break;
    }

    const double previous = ev.value;
    theta = step_from(theta, step);
    ev = evaluate_loglik(spec, theta, data, Derivatives::hessian);
    ++out.iterations;
    if (opts.verbose) {
      std::cerr << "iter " << out.iterations << "  loglik " << ev.value << "  |grad| "
                << ev.gradient.lpNorm<Eigen::Infinity>() << '\n';
    }

    for (Eigen::Index l = 0; l < theta.beta.size(); ++l) {
      if (std::fabs(theta.beta[l]) > opts.separation_bound && new_value > previous) {
        throw SeparationError("coefficient '" + data.names()[static_cast<std::size_t>(l)] +
                              "' exceeds |" + std::to_string(opts.separation_bound) +
                              "| while the log-likelihood keeps rising: the data appear "
                              "(quasi-)completely separated");
      }
    }
    if (step.lpNorm<Eigen::Infinity>() < opts.step_tolerance && !stationary(ev)) {
      out.message = "step size fell below tolerance before the gradient did";
      stalled = true;
      break;
    }
  }

  out.converged = stationary(ev);
  if (!out.converged && !stalled) out.message = "iteration limit reached";
  out.params = std::move(theta);
  out.eval = std::move(ev);
  return out;
}

FitResult assemble(const ModelSpec& spec, const Dataset& data, Maximum max) {
  FitResult fit;
  fit.spec = spec;
  fit.params = max.params;
  fit.observations = data.rows();
  fit.loglik_fit = max.eval.value;
  fit.iterations = max.iterations;
  fit.converged = max.converged;
  fit.message = max.message;
  fit.gradient_norm = max.eval.gradient.lpNorm<Eigen::Infinity>();
  fit.clamp_count = max.eval.clamp_count;

  const Eigen::Index p = spec.param_count();
  const Eigen::Index m = spec.free_cutpoints();
  Eigen::LLT<Eigen::MatrixXd> llt(-max.eval.hessian);
  if (llt.info() == Eigen::Success) {
    const Eigen::MatrixXd v = llt.solve(Eigen::MatrixXd::Identity(p, p));
    fit.vcov = 0.5 * (v + v.transpose());
    fit.se = fit.vcov.diagonal().cwiseMax(0.0).cwiseSqrt();
  } else {
    fit.vcov = Eigen::MatrixXd::Constant(p, p, kNaN);
    fit.se = Eigen::VectorXd::Constant(p, kNaN);
    fit.converged = false;
    if (fit.message.empty()) fit.message = "Hessian is not negative definite at the solution";
  }

  const Eigen::VectorXd gamma = cutpoints_from_delta(fit.params.delta);
  fit.cutpoints = gamma.segment(2, m);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index t = 0; t < m; ++t) {
    for (Eigen::Index d = 0; d <= t; ++d) jac(t, d) = std::exp(fit.params.delta[d]);
  }
  const Eigen::MatrixXd cov_gamma = jac * fit.vcov.bottomRightCorner(m, m) * jac.transpose();
  fit.cutpoint_se = cov_gamma.diagonal().cwiseMax(0.0).cwiseSqrt();

  fit.hit_rate = hit_rate(spec, fit.params, data);
  return fit;
}

}  // namespace

void FitOptions::validate() const {
  if (max_iterations < 1) throw DomainError("max iterations must be at least 1");
  if (!(gradient_tolerance > 0.0) || !(step_tolerance > 0.0)) {
    throw DomainError("tolerances must be positive");
  }
  if (!(ridge_start > 0.0) || !(ridge_growth > 1.0)) throw DomainError("bad ridge schedule");
  if (max_halvings < 0) throw DomainError("max halvings must be non-negative");
}

ParamVector starting_values(const ModelSpec& spec, const Dataset& data) {
  const auto counts = data.category_counts();
  const double n = static_cast<double>(data.rows());
  std::vector<double> cumulative(counts.size());
  double running = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    running += static_cast<double>(counts[j]);
    cumulative[j] = n > 0 ? running / n : static_cast<double>(j + 1) / counts.size();
  }

  ParamVector start{Eigen::VectorXd::Zero(spec.covariates),
                    Eigen::VectorXd::Zero(spec.free_cutpoints())};
  const bool interior = cumulative.front() > 0.0 && cumulative.front() < 1.0;
  if (spec.intercept && interior) {
    start.beta[0] = link_inv_cdf(spec.link, 1.0 - cumulative.front());
  }
  for (Eigen::Index d = 0; d < start.delta.size(); ++d) {
    const double lo = cumulative[static_cast<std::size_t>(d)];
    const double hi = cumulative[static_cast<std::size_t>(d) + 1];
    if (lo > 0.0 && hi < 1.0 && hi > lo) {
      start.delta[d] = std::log(link_inv_cdf(spec.link, hi) - link_inv_cdf(spec.link, lo));
    }
  }
  return start;
}

FitResult fit_ml(const ModelSpec& spec, const Dataset& data, const FitOptions& opts) {
  opts.validate();
  check_fit_inputs(spec, data);
  FitResult fit = assemble(spec, data, maximize(spec, data, opts));

  const FitResult null = fit_intercept_only(spec, data, opts);
  fit.loglik_0 = null.loglik_fit;
  fit.lr_df = spec.covariates - (spec.intercept ? 1 : 0);
  if (fit.lr_df > 0) {
    // A nested fit cannot beat the full one; guard against optimiser noise.
    const auto lr = lr_test(fit.loglik_0, std::max(fit.loglik_fit, fit.loglik_0), fit.lr_df);
    fit.lr_stat = lr.statistic;
    fit.lr_pvalue = lr.pvalue;
  }
  fit.mcfadden_r2 = std::max(0.0, mcfadden_r2(fit.loglik_0, fit.loglik_fit));
  return fit;
}

FitResult fit_intercept_only(const ModelSpec& spec, const Dataset& data, const FitOptions& opts) {
  opts.validate();
  ModelSpec reduced = spec;
  reduced.covariates = 1;
  reduced.intercept = true;
  const Dataset null_data = data.intercept_only();
  check_fit_inputs(reduced, null_data);
  FitResult fit = assemble(reduced, null_data, maximize(reduced, null_data, opts));
  fit.loglik_0 = fit.loglik_fit;
  return fit;
}

LrTest lr_test(double loglik_0, double loglik_fit, int df) {
  if (df <= 0) throw DomainError("lr_test: degrees of freedom must be positive");
  if (!(loglik_fit >= loglik_0 - 1e-8)) {
    throw DomainError("lr_test: fitted log-likelihood is below the restricted one");
  }
  const double stat = std::max(0.0, -2.0 * (loglik_0 - loglik_fit));
  const double p = stat == 0.0 ? 1.0 : boost::math::gamma_q(0.5 * df, 0.5 * stat);
  return {stat, p};
}

double mcfadden_r2(double loglik_0, double loglik_fit) {
  if (!(loglik_0 < 0.0)) throw DomainError("mcfadden_r2: intercept-only log-likelihood must be < 0");
  return 1.0 - loglik_fit / loglik_0;
}

Eigen::MatrixXd predict_prob(const ModelSpec& spec, const ParamVector& params,
                             const Eigen::MatrixXd& x_new) {
  if (x_new.cols() != params.beta.size() || params.beta.size() != spec.covariates) {
    throw DomainError("predict_prob: design has " + std::to_string(x_new.cols()) +
                      " columns, model expects " + std::to_string(spec.covariates));
  }
  if (params.delta.size() != spec.free_cutpoints()) {
    throw DomainError("predict_prob: wrong number of cut-point parameters");
  }
  const Eigen::VectorXd gamma = cutpoints_from_delta(params.delta);
  const Eigen::VectorXd eta = x_new * params.beta;
  Eigen::MatrixXd probs(x_new.rows(), spec.categories);
  for (Eigen::Index i = 0; i < x_new.rows(); ++i) probs.row(i) = cell_probs(spec.link, eta[i], gamma);
  return probs;
}

double hit_rate(const ModelSpec& spec, const ParamVector& params, const Dataset& data) {
  if (data.rows() == 0) return 0.0;
  const Eigen::MatrixXd probs = predict_prob(spec, params, data.x());
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < probs.cols(); ++j) {
      if (probs(i, j) > probs(i, best)) best = j;
    }
    if (best + 1 == data.y()[static_cast<std::size_t>(i)]) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(data.rows());
}

}  // namespace dchoice
