#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "dchoice/data.hpp"
#include "dchoice/model.hpp"

namespace dchoice {

// Log-probabilities at or below this value are clamped to it.
inline constexpr double kLogProbFloor = -745.0;

// Full threshold vector (-inf, 0, gamma_2, ..., gamma_{J-1}, +inf) of length
// J + 1 from the free log-spacings.
Eigen::VectorXd cutpoints_from_delta(const Eigen::VectorXd& delta);

// log[F(upper) - F(lower)] for lower < upper, either possibly infinite.
// Evaluated in whichever tail keeps precision. Results below kLogProbFloor
// are clamped and counted in *clamps when given.
double interval_logprob(Link link, double lower, double upper, std::size_t* clamps = nullptr);

// log P(y = j | xb) = log[F(gamma_j - xb) - F(gamma_{j-1} - xb)], j in 1..J,
// with `gamma` laid out as returned by cutpoints_from_delta. Any strictly
// increasing gamma is accepted (gamma_1 need not be 0).
double cell_logprob(const ModelSpec& spec, double xb, int j, const Eigen::VectorXd& gamma,
                    std::size_t* clamps = nullptr);

// Row of J cell probabilities at linear index xb.
Eigen::RowVectorXd cell_probs(Link link, double xb, const Eigen::VectorXd& gamma);

double loglik(const ModelSpec& spec, const ParamVector& params, const Dataset& data);
Eigen::VectorXd grad_loglik(const ModelSpec& spec, const ParamVector& params, const Dataset& data);
Eigen::MatrixXd hess_loglik(const ModelSpec& spec, const ParamVector& params, const Dataset& data);

// Everything the optimiser needs from one pass over the data. Parameter
// order is (beta, delta).
struct LoglikEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;  // empty unless requested
  Eigen::MatrixXd opg;      // sum of per-observation score outer products, if requested
  std::size_t clamp_count = 0;
};

enum class Derivatives { none, gradient, hessian };

LoglikEval evaluate_loglik(const ModelSpec& spec, const ParamVector& params, const Dataset& data,
                           Derivatives level, bool with_opg = false);

}  // namespace dchoice
