#pragma once

#include <string_view>

#include "dchoice/rng.hpp"

namespace dchoice {

// Error distribution of the latent index: standard normal or standard
// logistic (variance pi^2/3).
enum class Link { probit, logit };

std::string_view to_string(Link link);
Link parse_link(std::string_view name);

// Scalar kernels. Every one of these rejects non-finite arguments with
// DomainError.
double norm_cdf(double w);
double norm_pdf(double w);
double norm_inv_cdf(double p);
double logistic_cdf(double w);
double logistic_pdf(double w);

double link_cdf(Link link, double w);
double link_pdf(Link link, double w);

// log F(w), accurate far into the lower tail (no underflow to -inf for any
// finite w).
double link_log_cdf(Link link, double w);
double link_log_pdf(Link link, double w);

// f'(w) / f(w). Probit: -w. Logit: 1 - 2 Lambda(w).
double link_pdf_slope(Link link, double w);

// Quantile of the link distribution.
double link_inv_cdf(Link link, double p);

// One draw from N(mean, 1) restricted to (lower, upper]. Either bound may be
// infinite. Central intervals use inversion; intervals wholly beyond the
// tail threshold use exponential or uniform rejection, so truncation far in
// the tail stays exact.
double trunc_norm_sample(double mean, double lower, double upper, RandomStream& rng);

}  // namespace dchoice
