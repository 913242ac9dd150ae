#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "dchoice/bayes.hpp"
#include "dchoice/effects.hpp"
#include "dchoice/estimation.hpp"

namespace dchoice {

struct CoefficientRow {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p = 0.0;
  std::string stars;  // "**" p < 0.05, "*" p < 0.10, two-sided normal
  bool cutpoint = false;
};

// Everything a fit report shows. Text and JSON are both rendered from this,
// so the two never disagree.
struct FitSummary {
  std::string family;
  std::string link;
  int categories = 0;
  Eigen::Index observations = 0;
  std::vector<CoefficientRow> rows;
  double loglik_fit = 0.0;
  double loglik_0 = 0.0;
  double lr_stat = 0.0;
  int lr_df = 0;
  double lr_pvalue = 1.0;
  double mcfadden_r2 = 0.0;
  double hit_rate = 0.0;
  int iterations = 0;
  bool converged = false;
  std::size_t clamp_count = 0;
  std::string message;
  Eigen::MatrixXd vcov;
};

std::string significance_stars(double p);
double two_sided_normal_p(double z);

// Coefficient rows named by `names` (design order), then cut-points
// gamma_2..gamma_{J-1} with delta-method standard errors.
FitSummary summary_table(const FitResult& fit, const std::vector<std::string>& names);

// Numbers to four decimals.
std::string render_text(const FitSummary& summary);
// Full precision.
nlohmann::ordered_json to_json(const FitSummary& summary);

std::string render_text(const EffectsTable& table);
nlohmann::ordered_json to_json(const EffectsTable& table);

struct BayesSummary {
  std::string family;
  Eigen::Index observations = 0;
  Eigen::Index draws = 0;
  Eigen::Index burn_in = 0;
  std::uint64_t seed = 0;
  double acceptance_rate = 0.0;
  std::vector<ParameterSummary> parameters;
};

std::string render_text(const BayesSummary& summary);
nlohmann::ordered_json to_json(const BayesSummary& summary);

// printf("%.4f") with "nan" for non-finite values and no negative zero.
std::string fixed4(double v);

}  // namespace dchoice
