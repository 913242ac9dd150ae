#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dchoice/data.hpp"
#include "dchoice/rng.hpp"

namespace dchoice {

// beta ~ N(mean, cov); each free cut-point log-spacing ~ N(0, delta_variance).
struct PriorSpec {
  Eigen::VectorXd beta_mean;
  Eigen::MatrixXd beta_cov;
  double delta_variance = 25.0;

  // N(0, 100 I) on k coefficients.
  static PriorSpec weakly_informative(Eigen::Index k);
  void validate(Eigen::Index k) const;
};

struct ChainDraws {
  Eigen::MatrixXd beta;   // S x k, every sweep including burn-in
  Eigen::MatrixXd delta;  // S x (J - 2)
  double acceptance_rate = 0.0;  // cut-point MH; 0 when there are no cut-points
  std::uint64_t seed = 0;
  Eigen::Index burn_in = 0;
  std::optional<Eigen::VectorXd> last_latent;  // z after the final sweep

  Eigen::Index draws() const { return beta.rows(); }
};

inline constexpr Eigen::Index kDefaultDraws = 11000;
inline constexpr Eigen::Index kDefaultBurnIn = 1000;

// Albert-Chib data augmentation for the binary probit. Each sweep draws
// z_i ~ N(x_i'beta, 1) truncated to (0, inf) for successes and (-inf, 0]
// for failures, then beta | z from its normal full conditional.
ChainDraws gibbs_binary_probit(const Dataset& data, const PriorSpec& prior, Eigen::Index draws,
                               Eigen::Index burn_in, RandomStream& rng);

// Ordinal probit. Each sweep: a random-walk Metropolis step on all
// log-spacings jointly (scale mh_step), targeting the likelihood with z
// integrated out at the current beta; then z_i truncated to
// (gamma_{y_i - 1}, gamma_{y_i}]; then beta | z.
ChainDraws gibbs_ordinal_probit(const Dataset& data, const PriorSpec& prior, Eigen::Index draws,
                                Eigen::Index burn_in, double mh_step, RandomStream& rng);

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
};

// Post-burn-in summaries for every beta, every delta, and the implied
// cut-points gamma_2..gamma_{J-1}, in that order. Quantiles interpolate
// linearly between order statistics. Needs at least 100 kept draws.
std::vector<ParameterSummary> posterior_summary(const ChainDraws& chain,
                                                const std::vector<std::string>& beta_names = {});

// Linear-interpolation quantile of an already sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double prob);

// One row per sweep: draw index, burn-in flag, betas, deltas, cut-points.
void write_chain_csv(std::ostream& out, const ChainDraws& chain,
                     const std::vector<std::string>& beta_names);

}  // namespace dchoice
