#include "dchoice/model.hpp"

#include <string>

#include "dchoice/errors.hpp"

namespace dchoice {

std::string_view to_string(Family family) {
  return family == Family::binary ? "binary" : "ordinal";
}

Family parse_family(std::string_view name) {
  if (name == "binary") return Family::binary;
  if (name == "ordinal") return Family::ordinal;
  throw DomainError("unknown family '" + std::string(name) + "' (expected binary or ordinal)");
}

void ModelSpec::validate() const {
  if (family == Family::binary && categories != 2) {
    throw DomainError("binary model requires exactly 2 categories, got " +
                      std::to_string(categories));
  }
  if (categories < 2) throw DomainError("a model needs at least 2 response categories");
  if (covariates < 0) throw DomainError("covariate count must be non-negative");
  if (intercept && covariates < 1) throw DomainError("intercept flag set but design has no columns");
}

ModelSpec make_spec(Family family, Link link, int categories, int covariates, bool intercept) {
  ModelSpec spec{family, link, categories, covariates, intercept};
  spec.validate();
  return spec;
}

Eigen::VectorXd ParamVector::packed() const {
  Eigen::VectorXd theta(size());
  theta << beta, delta;
  return theta;
}

ParamVector ParamVector::unpack(const Eigen::VectorXd& theta, Eigen::Index k) {
  if (k < 0 || k > theta.size()) throw DomainError("ParamVector::unpack: bad coefficient count");
  return {theta.head(k), theta.tail(theta.size() - k)};
}

}  // namespace dchoice
