#include "dchoice/distributions.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dchoice/errors.hpp"

namespace dchoice {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Truncation points past this (in standard units) switch from inversion to
// rejection sampling.
constexpr double kTailThreshold = 6.0;

void require_finite(double w, const char* fn) {
  if (!std::isfinite(w)) {
    throw DomainError(std::string(fn) + ": argument must be finite");
  }
}

double norm_log_cdf(double w) {
  if (w >= 0.0) return std::log1p(-0.5 * std::erfc(w * kInvSqrt2));
  if (w > -37.0) return std::log(0.5 * std::erfc(-w * kInvSqrt2));
  // Asymptotic series for the Mills ratio; relative error below 1e-12 here.
  const double r = 1.0 / (w * w);
  const double series = 1.0 - r * (1.0 - r * (3.0 - r * (15.0 - r * 105.0)));
  return -0.5 * w * w - std::log(-w) - kLogSqrt2Pi + std::log(series);
}

double logistic_log_cdf(double w) {
  if (w > 0.0) return -std::log1p(std::exp(-w));
  return w - std::log1p(std::exp(w));
}

// Upper-tail draw from N(0,1) restricted to (a, b] with a >= kTailThreshold.
// Exponential proposal with the optimal rate when the interval is long,
// uniform proposal when it is short.
double tail_rejection(double a, double b, RandomStream& rng) {
  const double root = std::sqrt(a * a + 4.0);
  const double rate = 0.5 * (a + root);
  const double uniform_cutoff = (2.0 / (a + root)) * std::exp(0.25 * (a * a - a * root) + 0.5);
  if (b - a <= uniform_cutoff) {
    for (;;) {
      const double x = a + (b - a) * rng.uniform();
      if (std::log(rng.uniform()) <= 0.5 * (a * a - x * x)) return x;
    }
  }
  for (;;) {
    const double x = a + rng.exponential(rate);
    if (x > b) continue;
    const double d = x - rate;
    if (std::log(rng.uniform()) <= -0.5 * d * d) return x;
  }
}

// Standardised draw from N(0,1) restricted to (a, b].
double standard_trunc_draw(double a, double b, RandomStream& rng) {
  if (std::isinf(a) && std::isinf(b)) return rng.normal();
  // Reflect so the interval is never wholly in the lower tail.
  if (b <= 0.0) return -standard_trunc_draw(-b, -a, rng);

  if (a >= kTailThreshold) return tail_rejection(a, b, rng);

  const double u = rng.uniform();
  if (a > 0.0) {
    // Work with upper-tail probabilities, which keep full relative precision.
    const double q_hi = 0.5 * std::erfc(a * kInvSqrt2);
    const double q_lo = std::isinf(b) ? 0.0 : 0.5 * std::erfc(b * kInvSqrt2);
    const double q = q_hi - u * (q_hi - q_lo);
    return std::clamp(-norm_inv_cdf(q), a, b);
  }
  const double p_lo = std::isinf(a) ? 0.0 : norm_cdf(a);
  const double p_hi = std::isinf(b) ? 1.0 : norm_cdf(b);
  const double p = std::clamp(p_lo + u * (p_hi - p_lo), std::numeric_limits<double>::min(),
                              1.0 - std::numeric_limits<double>::epsilon() / 2.0);
  return std::clamp(norm_inv_cdf(p), a, b);
}

}  // namespace

std::string_view to_string(Link link) { return link == Link::probit ? "probit" : "logit"; }

Link parse_link(std::string_view name) {
  if (name == "probit") return Link::probit;
  if (name == "logit") return Link::logit;
  throw DomainError("unknown link '" + std::string(name) + "' (expected probit or logit)");
}

double norm_cdf(double w) {
  require_finite(w, "norm_cdf");
  return 0.5 * std::erfc(-w * kInvSqrt2);
}

double norm_pdf(double w) {
  require_finite(w, "norm_pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * w * w);
}

double norm_inv_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("norm_inv_cdf: p must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double logistic_cdf(double w) {
  require_finite(w, "logistic_cdf");
  if (w > 0.0) return 1.0 / (1.0 + std::exp(-w));
  const double e = std::exp(w);
  return e / (1.0 + e);
}

double logistic_pdf(double w) {
  require_finite(w, "logistic_pdf");
  const double e = std::exp(-std::fabs(w));
  const double d = 1.0 + e;
  return e / (d * d);
}

double link_cdf(Link link, double w) {
  return link == Link::probit ? norm_cdf(w) : logistic_cdf(w);
}

double link_pdf(Link link, double w) {
  return link == Link::probit ? norm_pdf(w) : logistic_pdf(w);
}

double link_log_cdf(Link link, double w) {
  require_finite(w, "link_log_cdf");
  return link == Link::probit ? norm_log_cdf(w) : logistic_log_cdf(w);
}

double link_log_pdf(Link link, double w) {
  require_finite(w, "link_log_pdf");
  if (link == Link::probit) return -0.5 * w * w - kLogSqrt2Pi;
  return logistic_log_cdf(w) + logistic_log_cdf(-w);
}

double link_pdf_slope(Link link, double w) {
  require_finite(w, "link_pdf_slope");
  if (link == Link::probit) return -w;
  return 1.0 - 2.0 * logistic_cdf(w);
}

double link_inv_cdf(Link link, double p) {
  if (link == Link::probit) return norm_inv_cdf(p);
  if (!(p > 0.0 && p < 1.0)) throw DomainError("link_inv_cdf: p must lie in (0, 1)");
  return std::log(p) - std::log1p(-p);
}

double trunc_norm_sample(double mean, double lower, double upper, RandomStream& rng) {
  if (std::isnan(mean) || std::isinf(mean) || std::isnan(lower) || std::isnan(upper)) {
    throw DomainError("trunc_norm_sample: mean must be finite and bounds not NaN");
  }
  if (!(lower < upper)) throw DomainError("trunc_norm_sample: requires lower < upper");

  const double x = mean + standard_trunc_draw(lower - mean, upper - mean, rng);
  // Rounding in the shift back can land exactly on a bound.
  if (x <= lower) return std::nextafter(lower, std::numeric_limits<double>::infinity());
  if (x > upper) return upper;
  return x;
}

}  // namespace dchoice
