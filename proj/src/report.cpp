#include "dchoice/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dchoice {

namespace {

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

// NaN becomes null in JSON.
nlohmann::ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::string fixed4(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

double two_sided_normal_p(double z) {
  if (!std::isfinite(z)) return std::nan("");
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

std::string significance_stars(double p) {
  if (!(p < 0.10)) return "";
  return p < 0.05 ? "**" : "*";
}

FitSummary summary_table(const FitResult& fit, const std::vector<std::string>& names) {
  FitSummary s;
  s.family = std::string(to_string(fit.spec.family));
  s.link = std::string(to_string(fit.spec.link));
  s.categories = fit.spec.categories;
  s.observations = fit.observations;
  auto add = [&](std::string name, double est, double se, bool cut) {
    CoefficientRow row{std::move(name), est, se, est / se, 0.0, "", cut};
    row.p = two_sided_normal_p(row.z);
    row.stars = significance_stars(row.p);
    s.rows.push_back(std::move(row));
  };
  for (Eigen::Index c = 0; c < fit.params.beta.size(); ++c) {
    const auto idx = static_cast<std::size_t>(c);
    add(idx < names.size() ? names[idx] : "beta[" + std::to_string(c) + "]", fit.params.beta[c],
        fit.se[c], false);
  }
  for (Eigen::Index d = 0; d < fit.cutpoints.size(); ++d) {
    add("cut-point " + std::to_string(d + 2), fit.cutpoints[d], fit.cutpoint_se[d], true);
  }
  s.loglik_fit = fit.loglik_fit;
  s.loglik_0 = fit.loglik_0;
  s.lr_stat = fit.lr_stat;
  s.lr_df = fit.lr_df;
  s.lr_pvalue = fit.lr_pvalue;
  s.mcfadden_r2 = fit.mcfadden_r2;
  s.hit_rate = fit.hit_rate;
  s.iterations = fit.iterations;
  s.converged = fit.converged;
  s.clamp_count = fit.clamp_count;
  s.message = fit.message;
  s.vcov = fit.vcov;
  return s;
}

std::string render_text(const FitSummary& s) {
  std::ostringstream out;
  out << "Model: " << s.family << ' ' << s.link << ", J = " << s.categories
      << ", n = " << s.observations << '\n';
  out << "Converged: " << (s.converged ? "yes" : "no") << " after " << s.iterations
      << " iterations";
  if (!s.message.empty()) out << " (" << s.message << ')';
  out << "\n\n";

  std::size_t name_w = 8;
  for (const auto& r : s.rows) name_w = std::max(name_w, r.name.size());
  constexpr std::size_t w = 12;
  out << pad_right("", name_w) << pad_left("estimate", w) << pad_left("std.err", w)
      << pad_left("z", w) << pad_left("p", w) << '\n';
  for (const auto& r : s.rows) {
    out << pad_right(r.name, name_w) << pad_left(fixed4(r.estimate), w) << pad_left(fixed4(r.se), w)
        << pad_left(fixed4(r.z), w) << pad_left(fixed4(r.p), w);
    if (!r.stars.empty()) out << ' ' << r.stars;
    out << '\n';
  }
  out << "\n** p < 0.05, * p < 0.10\n\n";
  out << "Log-likelihood: " << fixed4(s.loglik_fit) << '\n';
  out << "Log-likelihood (intercept only): " << fixed4(s.loglik_0) << '\n';
  out << "LR statistic: " << fixed4(s.lr_stat) << " (df = " << s.lr_df
      << ", p = " << fixed4(s.lr_pvalue) << ")\n";
  out << "McFadden R2: " << fixed4(s.mcfadden_r2) << '\n';
  out << "Hit rate: " << fixed4(s.hit_rate) << '\n';
  if (s.clamp_count > 0) {
    out << "Note: " << s.clamp_count << " cell probabilities hit the numerical floor\n";
  }
  return out.str();
}

nlohmann::ordered_json to_json(const FitSummary& s) {
  nlohmann::ordered_json j;
  j["model"] = {{"family", s.family}, {"link", s.link}, {"categories", s.categories}};
  j["observations"] = s.observations;
  j["converged"] = s.converged;
  j["iterations"] = s.iterations;
  j["message"] = s.message;
  j["coefficients"] = nlohmann::ordered_json::array();
  j["cutpoints"] = nlohmann::ordered_json::array();
  for (const auto& r : s.rows) {
    nlohmann::ordered_json row = {{"name", r.name},       {"estimate", number(r.estimate)},
                                  {"se", number(r.se)},    {"z", number(r.z)},
                                  {"p", number(r.p)},      {"stars", r.stars}};
    j[r.cutpoint ? "cutpoints" : "coefficients"].push_back(std::move(row));
  }
  j["loglik"] = number(s.loglik_fit);
  j["loglik_0"] = number(s.loglik_0);
  j["lr_stat"] = number(s.lr_stat);
  j["lr_df"] = s.lr_df;
  j["lr_pvalue"] = number(s.lr_pvalue);
  j["mcfadden_r2"] = number(s.mcfadden_r2);
  j["hit_rate"] = number(s.hit_rate);
  j["clamp_count"] = s.clamp_count;
  auto vcov = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < s.vcov.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < s.vcov.cols(); ++c) row.push_back(number(s.vcov(r, c)));
    vcov.push_back(std::move(row));
  }
  j["vcov"] = std::move(vcov);
  return j;
}

std::string render_text(const EffectsTable& t) {
  std::ostringstream out;
  std::size_t name_w = 9;
  for (const auto& r : t.rows) name_w = std::max(name_w, r.label.size());
  std::size_t w = 12;
  for (const auto& c : t.categories) w = std::max(w, c.size() + 2);

  out << "Average covariate effects on P(y = j)\n\n";
  out << pad_right("covariate", name_w);
  for (const auto& c : t.categories) out << pad_left(c, w);
  out << '\n';
  bool any_log = false;
  for (const auto& r : t.rows) {
    std::string label = r.label;
    if (r.log_scale) {
      label += " +";
      any_log = true;
    }
    out << pad_right(label, name_w);
    for (Eigen::Index j = 0; j < r.average.size(); ++j) out << pad_left(fixed4(r.average[j]), w);
    out << '\n';
  }
  if (any_log) {
    out << "\n+ log-transformed covariate: effect per unit of log(x); divide by x for a unit of x\n";
  }
  return out.str();
}

nlohmann::ordered_json to_json(const EffectsTable& t) {
  nlohmann::ordered_json j;
  j["categories"] = t.categories;
  j["effects"] = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    auto values = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < r.average.size(); ++c) values.push_back(number(r.average[c]));
    j["effects"].push_back({{"covariate", r.name},
                            {"label", r.label},
                            {"kind", r.kind == EffectKind::indicator ? "indicator" : "continuous"},
                            {"log_scale", r.log_scale},
                            {"scale", r.scale},
                            {"average_effect", std::move(values)}});
  }
  return j;
}

std::string render_text(const BayesSummary& s) {
  std::ostringstream out;
  out << "Posterior summary: " << s.family << " probit, n = " << s.observations << '\n';
  out << "Draws: " << s.draws << " (burn-in " << s.burn_in << "), seed " << s.seed << '\n';
  if (s.family == "ordinal") out << "Cut-point acceptance rate: " << fixed4(s.acceptance_rate) << '\n';
  out << '\n';
  std::size_t name_w = 9;
  for (const auto& p : s.parameters) name_w = std::max(name_w, p.name.size());
  constexpr std::size_t w = 12;
  out << pad_right("parameter", name_w) << pad_left("mean", w) << pad_left("sd", w)
      << pad_left("2.5%", w) << pad_left("50%", w) << pad_left("97.5%", w) << '\n';
  for (const auto& p : s.parameters) {
    out << pad_right(p.name, name_w) << pad_left(fixed4(p.mean), w) << pad_left(fixed4(p.sd), w)
        << pad_left(fixed4(p.q025), w) << pad_left(fixed4(p.q50), w) << pad_left(fixed4(p.q975), w)
        << '\n';
  }
  return out.str();
}

nlohmann::ordered_json to_json(const BayesSummary& s) {
  nlohmann::ordered_json j;
  j["family"] = s.family;
  j["link"] = "probit";
  j["observations"] = s.observations;
  j["draws"] = s.draws;
  j["burn_in"] = s.burn_in;
  j["seed"] = s.seed;
  j["acceptance_rate"] = s.acceptance_rate;
  j["parameters"] = nlohmann::ordered_json::array();
  for (const auto& p : s.parameters) {
    j["parameters"].push_back({{"name", p.name},
                               {"mean", number(p.mean)},
                               {"sd", number(p.sd)},
                               {"q2.5", number(p.q025)},
                               {"q50", number(p.q50)},
                               {"q97.5", number(p.q975)}});
  }
  return j;
}

}  // namespace dchoice
