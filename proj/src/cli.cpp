#include "dchoice/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "dchoice/bayes.hpp"
#include "dchoice/csv.hpp"
#include "dchoice/data.hpp"
#include "dchoice/effects.hpp"
#include "dchoice/errors.hpp"
#include "dchoice/estimation.hpp"
#include "dchoice/report.hpp"

namespace dchoice {

namespace {

// Bad flags or values that only show up after parsing.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string data_path;
  std::string schema_path;
  std::string family;  // empty = infer from the number of labels
  std::string link = "probit";
  std::string out;
  std::uint64_t seed = kDefaultSeed;
  FitOptions fit;
  std::vector<std::string> covariates;
  std::vector<std::string> scales;
  double pfilter = 1.0;
  bool pfilter_set = false;
  // simulate
  std::string beta;
  std::string cutpoints;
  long long n = 1000;
  bool no_intercept = false;
  // bayes
  long long draws = kDefaultDraws;
  long long burn = kDefaultBurnIn;
  double mh_step = 0.1;
};

double to_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw InputError(what + ": '" + text + "' is not a number");
  }
  return v;
}

Eigen::VectorXd parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) values.push_back(to_double(item, what));
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << content;
  if (!f) throw InputError("failed writing '" + path + "'");
}

struct Loaded {
  SchemaConfig schema;
  EncodedData encoded;
  ModelSpec spec;
};

Loaded load(const RunConfig& cfg, std::ostream& err) {
  SchemaConfig schema = read_schema_file(cfg.schema_path);
  const RawTable raw = read_csv_file(cfg.data_path);
  EncodedData encoded = build_dataset(raw, schema);
  for (const auto& w : encoded.report.warnings) err << "warning: " << w << '\n';
  if (encoded.report.dropped_rows > 0) {
    err << "note: dropped " << encoded.report.dropped_rows << " of " << encoded.report.raw_rows
        << " rows with missing values\n";
  }
  const int J = schema.categories();
  const Family family = cfg.family.empty() ? (J == 2 ? Family::binary : Family::ordinal)
                                           : parse_family(cfg.family);
  const ModelSpec spec = make_spec(family, parse_link(cfg.link), J,
                                   static_cast<int>(encoded.data.cols()), schema.intercept);
  return {std::move(schema), std::move(encoded), spec};
}

void add_model_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--family", cfg.family, "binary or ordinal (default: from the label count)");
  cmd->add_option("--link", cfg.link, "probit or logit")->capture_default_str();
  cmd->add_option("--out", cfg.out, "output path stem")->required();
  cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
}

void add_data_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--data", cfg.data_path, "CSV data file")->required();
  cmd->add_option("--schema", cfg.schema_path, "schema file")->required();
}

void add_fit_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--max-iter", cfg.fit.max_iterations, "Newton iteration limit")
      ->capture_default_str();
  cmd->add_option("--tol", cfg.fit.gradient_tolerance, "gradient sup-norm tolerance")
      ->capture_default_str();
  cmd->add_flag("--verbose", cfg.fit.verbose, "print the iteration trace");
}

int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Loaded in = load(cfg, err);
  const FitResult fit = fit_ml(in.spec, in.encoded.data, cfg.fit);
  const FitSummary summary = summary_table(fit, in.encoded.data.names());
  const std::string text = render_text(summary);
  write_file(cfg.out + ".txt", text);
  write_file(cfg.out + ".json", to_json(summary).dump(2) + "\n");
  out << text;
  if (!fit.converged) {
    err << "error: estimation did not converge: " << fit.message << '\n';
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_effects(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Loaded in = load(cfg, err);
  const Dataset& data = in.encoded.data;
  const FitResult fit = fit_ml(in.spec, data, cfg.fit);
  const FitSummary summary = summary_table(fit, data.names());

  std::map<std::string, double> scale_of;
  for (const auto& s : cfg.scales) {
    const auto eq = s.rfind('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--scale expects NAME=MULT, got '" + s + "'");
    scale_of[s.substr(0, eq)] = to_double(s.substr(eq + 1), "--scale " + s.substr(0, eq));
  }
  auto column_of = [&](const std::string& name) -> Eigen::Index {
    const auto& names = data.names();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InputError("unknown covariate '" + name + "'");
    return it - names.begin();
  };
  for (const auto& [name, mult] : scale_of) column_of(name);

  std::vector<Eigen::Index> columns;
  if (cfg.covariates.empty()) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      if (data.kinds()[static_cast<std::size_t>(c)] != ColumnKind::intercept) columns.push_back(c);
    }
  } else {
    for (const auto& name : cfg.covariates) {
      const auto c = column_of(name);
      if (data.kinds()[static_cast<std::size_t>(c)] == ColumnKind::intercept) {
        throw InputError("effects are not defined for the intercept");
      }
      columns.push_back(c);
    }
    std::sort(columns.begin(), columns.end());
    columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  }

  std::vector<EffectRequest> requests;
  for (auto c : columns) {
    if (cfg.pfilter_set && !(summary.rows[static_cast<std::size_t>(c)].p < cfg.pfilter)) continue;
    const auto it = scale_of.find(data.names()[static_cast<std::size_t>(c)]);
    requests.push_back({c, it == scale_of.end() ? 1.0 : it->second});
  }
  const EffectsTable table = effects_table(in.spec, fit.params, data, requests, in.schema.labels);
  const std::string text = render_text(table);
  write_file(cfg.out + ".txt", text);
  write_file(cfg.out + ".json", to_json(table).dump(2) + "\n");
  out << text;
  if (!fit.converged) {
    err << "error: estimation did not converge: " << fit.message << '\n';
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.beta.empty()) throw InputError("--beta is required");
  const Eigen::VectorXd beta = parse_vector(cfg.beta, "--beta");
  const Eigen::VectorXd cuts = parse_vector(cfg.cutpoints, "--cutpoints");
  const int J = static_cast<int>(cuts.size()) + 2;
  const Family family = cfg.family.empty() ? (J == 2 ? Family::binary : Family::ordinal)
                                           : parse_family(cfg.family);
  if (cfg.n < 0) throw InputError("--n must be non-negative");
  const ModelSpec spec = make_spec(family, parse_link(cfg.link), J, static_cast<int>(beta.size()),
                                   !cfg.no_intercept);
  RandomStream rng(cfg.seed);
  const Dataset data = simulate_dataset(spec, beta, cuts, cfg.n, rng);

  std::ostringstream csv;
  write_csv(csv, dataset_to_table(data));
  write_file(cfg.out + ".csv", csv.str());
  write_file(cfg.out + ".schema", format_schema(schema_for(data)));
  out << "wrote " << data.rows() << " rows to " << cfg.out << ".csv and schema to " << cfg.out
      << ".schema\n";
  return kExitOk;
}

int cmd_bayes(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.link != "probit") throw InputError("Bayesian estimation is implemented for the probit link only");
  const Loaded in = load(cfg, err);
  const Dataset& data = in.encoded.data;
  const PriorSpec prior = PriorSpec::weakly_informative(data.cols());
  RandomStream rng(cfg.seed);
  const ChainDraws chain =
      in.spec.family == Family::binary
          ? gibbs_binary_probit(data, prior, cfg.draws, cfg.burn, rng)
          : gibbs_ordinal_probit(data, prior, cfg.draws, cfg.burn, cfg.mh_step, rng);

  BayesSummary summary{std::string(to_string(in.spec.family)), data.rows(), chain.draws(),
                       chain.burn_in, chain.seed, chain.acceptance_rate,
                       posterior_summary(chain, data.names())};
  std::ostringstream csv;
  write_chain_csv(csv, chain, data.names());
  write_file(cfg.out + "_chain.csv", csv.str());
  const std::string text = render_text(summary);
  write_file(cfg.out + ".txt", text);
  write_file(cfg.out + ".json", to_json(summary).dump(2) + "\n");
  out << text;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Binary and ordinal probit/logit estimation"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* fit = app.add_subcommand("fit", "maximum likelihood fit and report");
  add_data_flags(fit, cfg);
  add_model_flags(fit, cfg);
  add_fit_flags(fit, cfg);

  auto* effects = app.add_subcommand("effects", "average covariate effects");
  add_data_flags(effects, cfg);
  add_model_flags(effects, cfg);
  add_fit_flags(effects, cfg);
  effects->add_option("--covariate", cfg.covariates, "restrict to these design columns");
  effects->add_option("--scale", cfg.scales, "NAME=MULT scale for a continuous covariate");
  effects->add_option("--pfilter", cfg.pfilter, "keep covariates with coefficient p below this")
      ->each([&](const std::string&) { cfg.pfilter_set = true; });

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  add_model_flags(simulate, cfg);
  simulate->add_option("--beta", cfg.beta, "comma-separated coefficients (intercept first)");
  simulate->add_option("--cutpoints", cfg.cutpoints, "comma-separated gamma_2..gamma_{J-1}");
  simulate->add_option("--n", cfg.n, "number of observations")->capture_default_str();
  simulate->add_flag("--no-intercept", cfg.no_intercept, "omit the intercept column");

  auto* bayes = app.add_subcommand("bayes", "Gibbs sampler for probit models");
  add_data_flags(bayes, cfg);
  add_model_flags(bayes, cfg);
  bayes->add_option("--draws", cfg.draws, "total sweeps")->capture_default_str();
  bayes->add_option("--burn", cfg.burn, "burn-in sweeps")->capture_default_str();
  bayes->add_option("--mh-step", cfg.mh_step, "cut-point proposal scale")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (*fit) return cmd_fit(cfg, out, err);
    if (*effects) return cmd_effects(cfg, out, err);
    if (*simulate) return cmd_simulate(cfg, out, err);
    if (*bayes) return cmd_bayes(cfg, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const SeparationError& e) {
    err << "error: separation: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInputError;
}

}  // namespace dchoice
