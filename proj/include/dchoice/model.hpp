#pragma once

#include <Eigen/Dense>
#include <string_view>

#include "dchoice/distributions.hpp"

namespace dchoice {

enum class Family { binary, ordinal };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

// Model structure: response family, link, number of categories J, number of
// design columns k, and whether column 0 is an intercept.
//
// Binary models always have J = 2. Ordinal models are normally J >= 3, but
// J = 2 is accepted and reduces exactly to the binary likelihood.
struct ModelSpec {
  Family family = Family::binary;
  Link link = Link::probit;
  int categories = 2;
  int covariates = 0;
  bool intercept = true;

  // Number of free cut-point parameters, J - 2.
  int free_cutpoints() const { return categories - 2; }
  int param_count() const { return covariates + free_cutpoints(); }

  // Throws DomainError when the fields are inconsistent.
  void validate() const;
};

ModelSpec make_spec(Family family, Link link, int categories, int covariates,
                    bool intercept = true);

// Coefficients plus log-spacings of the interior cut-points:
// gamma_1 = 0, gamma_j = gamma_{j-1} + exp(delta_j).
struct ParamVector {
  Eigen::VectorXd beta;
  Eigen::VectorXd delta;

  Eigen::Index size() const { return beta.size() + delta.size(); }
  Eigen::VectorXd packed() const;
  static ParamVector unpack(const Eigen::VectorXd& theta, Eigen::Index k);
};

}  // namespace dchoice
