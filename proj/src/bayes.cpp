#include "dchoice/bayes.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "dchoice/csv.hpp"
#include "dchoice/distributions.hpp"
#include "dchoice/errors.hpp"
#include "dchoice/estimation.hpp"
#include "dchoice/likelihood.hpp"

namespace dchoice {

namespace {

// beta | z ~ N(P^{-1}(B0^{-1} b0 + X'z), P^{-1}) with P = B0^{-1} + X'X.
class BetaConditional {
 public:
  BetaConditional(const Eigen::MatrixXd& x, const PriorSpec& prior) : x_(x) {
    const Eigen::Index k = x.cols();
    Eigen::LLT<Eigen::MatrixXd> prior_llt(prior.beta_cov);
    if (prior_llt.info() != Eigen::Success) {
      throw NumericError("prior covariance is not positive definite");
    }
    const Eigen::MatrixXd prior_precision = prior_llt.solve(Eigen::MatrixXd::Identity(k, k));
    prior_term_ = prior_precision * prior.beta_mean;
    Eigen::MatrixXd precision = prior_precision;
    precision.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    precision.triangularView<Eigen::StrictlyUpper>() = precision.transpose();
    llt_.compute(precision);
    if (llt_.info() != Eigen::Success) {
      throw NumericError("posterior precision of beta is singular");
    }
  }

  Eigen::VectorXd draw(const Eigen::VectorXd& z, RandomStream& rng) const {
    const Eigen::VectorXd mean = llt_.solve(prior_term_ + x_.transpose() * z);
    Eigen::VectorXd eps(mean.size());
    for (Eigen::Index c = 0; c < eps.size(); ++c) eps[c] = rng.normal();
    // P = U'U, so U^{-1} eps has covariance P^{-1}.
    return mean + llt_.matrixU().solve(eps);
  }

 private:
  const Eigen::MatrixXd& x_;
  Eigen::VectorXd prior_term_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

void check_chain_args(const Dataset& data, const PriorSpec& prior, Eigen::Index draws,
                      Eigen::Index burn_in) {
  prior.validate(data.cols());
  if (burn_in < 0 || draws <= burn_in) {
    throw DomainError("need draws > burn-in >= 0");
  }
}

double ordinal_loglik(const Dataset& data, const Eigen::VectorXd& eta, const Eigen::VectorXd& gamma) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const int j = data.y()[static_cast<std::size_t>(i)];
    total += interval_logprob(Link::probit, gamma[j - 1] - eta[i], gamma[j] - eta[i]);
  }
  return total;
}

double delta_log_prior(const Eigen::VectorXd& delta, double variance) {
  return -0.5 * delta.squaredNorm() / variance;
}

void draw_latent(const Dataset& data, const Eigen::VectorXd& eta, const Eigen::VectorXd& gamma,
                 Eigen::VectorXd& z, RandomStream& rng) {
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const int j = data.y()[static_cast<std::size_t>(i)];
    z[i] = trunc_norm_sample(eta[i], gamma[j - 1], gamma[j], rng);
    assert(gamma[j - 1] < z[i] && z[i] <= gamma[j]);
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PriorSpec PriorSpec::weakly_informative(Eigen::Index k) {
  return {Eigen::VectorXd::Zero(k), 100.0 * Eigen::MatrixXd::Identity(k, k), 25.0};
}

void PriorSpec::validate(Eigen::Index k) const {
  if (beta_mean.size() != k || beta_cov.rows() != k || beta_cov.cols() != k) {
    throw DomainError("prior dimensions do not match the design");
  }
  if (!beta_cov.isApprox(beta_cov.transpose())) throw DomainError("prior covariance not symmetric");
  if (Eigen::LLT<Eigen::MatrixXd>(beta_cov).info() != Eigen::Success) {
    throw DomainError("prior covariance not positive definite");
  }
  if (!(delta_variance > 0.0)) throw DomainError("cut-point prior variance must be positive");
}

ChainDraws gibbs_binary_probit(const Dataset& data, const PriorSpec& prior, Eigen::Index draws,
                               Eigen::Index burn_in, RandomStream& rng) {
  if (data.categories() != 2) {
    throw DomainError("gibbs_binary_probit needs a binary response (J = 2)");
  }
  check_chain_args(data, prior, draws, burn_in);
  const Eigen::Index k = data.cols();
  const auto& X = data.x();
  const BetaConditional beta_given_z(X, prior);
  const Eigen::VectorXd gamma = cutpoints_from_delta(Eigen::VectorXd());

  ChainDraws chain;
  chain.beta.resize(draws, k);
  chain.delta.resize(draws, 0);
  chain.seed = rng.seed();
  chain.burn_in = burn_in;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd z(data.rows());
  for (Eigen::Index s = 0; s < draws; ++s) {
    draw_latent(data, X * beta, gamma, z, rng);
    beta = beta_given_z.draw(z, rng);
    chain.beta.row(s) = beta.transpose();
  }
  chain.last_latent = std::move(z);
  return chain;
}

ChainDraws gibbs_ordinal_probit(const Dataset& data, const PriorSpec& prior, Eigen::Index draws,
                                Eigen::Index burn_in, double mh_step, RandomStream& rng) {
  if (data.categories() < 3) {
    throw DomainError("gibbs_ordinal_probit needs J >= 3; use gibbs_binary_probit for J = 2");
  }
  if (!(mh_step > 0.0)) throw DomainError("mh_step must be positive");
  check_chain_args(data, prior, draws, burn_in);

  const Eigen::Index k = data.cols();
  const int J = data.categories();
  const auto& X = data.x();
  const BetaConditional beta_given_z(X, prior);

  const ModelSpec spec{Family::ordinal, Link::probit, J, static_cast<int>(k), data.has_intercept()};
  Eigen::VectorXd delta = starting_values(spec, data).delta;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd gamma = cutpoints_from_delta(delta);

  ChainDraws chain;
  chain.beta.resize(draws, k);
  chain.delta.resize(draws, J - 2);
  chain.seed = rng.seed();
  chain.burn_in = burn_in;

  Eigen::VectorXd z(data.rows());
  Eigen::VectorXd proposal(delta.size());
  Eigen::Index accepted = 0;
  for (Eigen::Index s = 0; s < draws; ++s) {
    const Eigen::VectorXd eta = X * beta;

    for (Eigen::Index d = 0; d < proposal.size(); ++d) proposal[d] = delta[d] + mh_step * rng.normal();
    const Eigen::VectorXd gamma_prop = cutpoints_from_delta(proposal);
    const double log_ratio = ordinal_loglik(data, eta, gamma_prop) +
                             delta_log_prior(proposal, prior.delta_variance) -
                             ordinal_loglik(data, eta, gamma) -
                             delta_log_prior(delta, prior.delta_variance);
    if (std::log(rng.uniform()) < log_ratio) {
      delta = proposal;
      gamma = gamma_prop;
      ++accepted;
    }
    for (Eigen::Index t = 1; t < gamma.size(); ++t) {
      if (!(gamma[t] > gamma[t - 1])) throw NumericError("cut-points lost their order");
    }

    draw_latent(data, eta, gamma, z, rng);
    beta = beta_given_z.draw(z, rng);
    chain.beta.row(s) = beta.transpose();
    chain.delta.row(s) = delta.transpose();
  }
  chain.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(draws);
  chain.last_latent = std::move(z);
  return chain;
}

double sorted_quantile(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<ParameterSummary> posterior_summary(const ChainDraws& chain,
                                                const std::vector<std::string>& beta_names) {
  const Eigen::Index kept = chain.draws() - chain.burn_in;
  if (kept < 100) throw DomainError("posterior_summary needs at least 100 post-burn-in draws");
  const Eigen::Index k = chain.beta.cols();
  const Eigen::Index m = chain.delta.cols();

  auto summarize = [&](std::string name, const auto& column) {
    std::vector<double> v(column.begin() + chain.burn_in, column.end());
    // Centre on the first draw so a constant chain has exactly zero spread.
    const double origin = v.front();
    double shift = 0.0;
    for (double x : v) shift += x - origin;
    const double mean = origin + shift / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    std::sort(v.begin(), v.end());
    return ParameterSummary{std::move(name), mean,
                            std::sqrt(ss / static_cast<double>(v.size() - 1)),
                            sorted_quantile(v, 0.025), sorted_quantile(v, 0.5),
                            sorted_quantile(v, 0.975)};
  };

  std::vector<ParameterSummary> out;
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto idx = static_cast<std::size_t>(c);
    std::string name = idx < beta_names.size() ? beta_names[idx] : "beta[" + std::to_string(c) + "]";
    const Eigen::VectorXd col = chain.beta.col(c);
    out.push_back(summarize(std::move(name), col));
  }
  for (Eigen::Index d = 0; d < m; ++d) {
    const Eigen::VectorXd col = chain.delta.col(d);
    out.push_back(summarize("delta[" + std::to_string(d + 2) + "]", col));
  }
  if (m > 0) {
    Eigen::MatrixXd gamma(chain.draws(), m);
    for (Eigen::Index s = 0; s < chain.draws(); ++s) {
      gamma.row(s) = cutpoints_from_delta(chain.delta.row(s).transpose()).segment(2, m).transpose();
    }
    for (Eigen::Index d = 0; d < m; ++d) {
      const Eigen::VectorXd col = gamma.col(d);
      out.push_back(summarize("gamma[" + std::to_string(d + 2) + "]", col));
    }
  }
  return out;
}

void write_chain_csv(std::ostream& out, const ChainDraws& chain,
                     const std::vector<std::string>& beta_names) {
  const Eigen::Index k = chain.beta.cols();
  const Eigen::Index m = chain.delta.cols();
  out << "draw,burn_in";
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto idx = static_cast<std::size_t>(c);
    out << ',' << csv_escape(idx < beta_names.size() ? beta_names[idx] : "beta[" + std::to_string(c) + "]");
  }
  for (Eigen::Index d = 0; d < m; ++d) out << ",delta[" << d + 2 << ']';
  for (Eigen::Index d = 0; d < m; ++d) out << ",gamma[" << d + 2 << ']';
  out << '\n';
  for (Eigen::Index s = 0; s < chain.draws(); ++s) {
    out << s + 1 << ',' << (s < chain.burn_in ? 1 : 0);
    for (Eigen::Index c = 0; c < k; ++c) out << ',' << format_double(chain.beta(s, c));
    for (Eigen::Index d = 0; d < m; ++d) out << ',' << format_double(chain.delta(s, d));
    if (m > 0) {
      const Eigen::VectorXd gamma = cutpoints_from_delta(chain.delta.row(s).transpose());
      for (Eigen::Index d = 0; d < m; ++d) out << ',' << format_double(gamma[d + 2]);
    }
    out << '\n';
  }
}

}  // namespace dchoice
