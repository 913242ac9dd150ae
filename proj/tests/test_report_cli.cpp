#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unistd.h>

#include "dchoice/cli.hpp"
#include "dchoice/report.hpp"
#include "oracles.hpp"

using namespace dchoice;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("dchoice_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const std::string& file, const std::string& text) { std::ofstream(file, std::ios::binary) << text; }

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Whitespace-separated tokens of the text-report line starting with `name`.
std::vector<std::string> row_tokens(const std::string& text, const std::string& name) {
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind(name + " ", 0) == 0) {
      std::istringstream t(line.substr(name.size()));
      std::vector<std::string> tokens;
      for (std::string tok; t >> tok;) tokens.push_back(tok);
      return tokens;
    }
  }
  return {};
}

std::string footer_value(const std::string& text, const std::string& label) {
  const auto at = text.find(label);
  if (at == std::string::npos) return {};
  std::istringstream t(text.substr(at + label.size()));
  std::string tok;
  t >> tok;
  return tok;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("significance stars") {
  CHECK(significance_stars(0.001) == "**");
  CHECK(significance_stars(0.0499) == "**");
  CHECK(significance_stars(0.05) == "*");
  CHECK(significance_stars(0.0999) == "*");
  CHECK(significance_stars(0.10) == "");
  CHECK(significance_stars(0.7) == "");
  CHECK(two_sided_normal_p(0.0) == 1.0);
  CHECK(two_sided_normal_p(1.96) == doctest::Approx(2 * (1 - oracle::phi_series(1.96))).epsilon(1e-12));
  // 1.96 rounds the 97.5% quantile up, so its p sits just under 0.05
  CHECK(significance_stars(two_sided_normal_p(1.96)) == "**");
  CHECK(significance_stars(two_sided_normal_p(-1.9599)) == "*");
  CHECK(significance_stars(two_sided_normal_p(1.7)) == "*");
  CHECK(significance_stars(two_sided_normal_p(1.6)) == "");
}

TEST_CASE("fixed4") {
  CHECK(fixed4(1.23456) == "1.2346");
  CHECK(fixed4(-0.00001) == "0.0000");
  CHECK(fixed4(std::nan("")) == "nan");
  CHECK(fixed4(-2.5) == "-2.5000");
}

TEST_CASE("summary_table mirrors the fit") {
  RandomStream rng(3);
  const auto spec = make_spec(Family::ordinal, Link::logit, 4, 3);
  Eigen::VectorXd beta(3), cuts(2);
  beta << 0.2, 0.5, -0.05;
  cuts << 0.9, 2.0;
  const auto data = simulate_dataset(spec, beta, cuts, 600, rng);
  const auto fit = fit_ml(spec, data);
  const auto s = summary_table(fit, data.names());
  REQUIRE(s.rows.size() == 5);
  CHECK(s.loglik_fit == fit.loglik_fit);
  CHECK(s.loglik_0 == fit.loglik_0);
  CHECK(s.lr_stat == fit.lr_stat);
  CHECK(s.lr_df == fit.lr_df);
  CHECK(s.lr_pvalue == fit.lr_pvalue);
  CHECK(s.mcfadden_r2 == fit.mcfadden_r2);
  CHECK(s.hit_rate == fit.hit_rate);
  CHECK(s.converged == fit.converged);
  for (int l = 0; l < 3; ++l) {
    const auto& r = s.rows[static_cast<std::size_t>(l)];
    CHECK(r.name == data.names()[static_cast<std::size_t>(l)]);
    CHECK(r.estimate == fit.params.beta[l]);
    CHECK(r.se == fit.se[l]);
    CHECK(r.z == r.estimate / r.se);
    CHECK(r.p == two_sided_normal_p(r.z));
    CHECK(r.stars == significance_stars(r.p));
    CHECK_FALSE(r.cutpoint);
  }
  CHECK(s.rows[3].name == "cut-point 2");
  CHECK(s.rows[3].cutpoint);
  CHECK(s.rows[3].estimate == fit.cutpoints[0]);
  CHECK(s.rows[4].se == fit.cutpoint_se[1]);

  const auto text = render_text(s);
  const auto json = to_json(s);
  CHECK(footer_value(text, "Log-likelihood:") == fixed4(json["loglik"].get<double>()));
  CHECK(footer_value(text, "LR statistic:") == fixed4(json["lr_stat"].get<double>()));
  CHECK(footer_value(text, "McFadden R2:") == fixed4(json["mcfadden_r2"].get<double>()));
  CHECK(footer_value(text, "Hit rate:") == fixed4(json["hit_rate"].get<double>()));
  CHECK(json["lr_stat"].get<double>() == fit.lr_stat);
  CHECK(json["hit_rate"].get<double>() == fit.hit_rate);
  CHECK(json["vcov"].size() == 5);
  for (const auto& block : {json["coefficients"], json["cutpoints"]}) {
    for (const auto& row : block) {
      const auto tokens = row_tokens(text, row["name"].get<std::string>());
      REQUIRE(tokens.size() >= 4);
      CHECK(tokens[0] == fixed4(row["estimate"].get<double>()));
      CHECK(tokens[1] == fixed4(row["se"].get<double>()));
      CHECK(tokens[2] == fixed4(row["z"].get<double>()));
      CHECK(tokens[3] == fixed4(row["p"].get<double>()));
      const std::string stars = tokens.size() > 4 ? tokens[4] : "";
      CHECK(stars == row["stars"].get<std::string>());
    }
  }
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("simulate is byte-identical for a fixed seed") {
  TempDir dir("sim");
  const std::vector<std::string> base = {"simulate", "--beta", "0.3,0.8,-0.5", "--cutpoints", "1.0",
                                         "--n", "500"};
  auto a = base, b = base, c = base;
  a.insert(a.end(), {"--out", dir / "a"});
  b.insert(b.end(), {"--out", dir / "b"});
  c.insert(c.end(), {"--out", dir / "c", "--seed", "7"});
  REQUIRE(run(a).code == kExitOk);
  REQUIRE(run(b).code == kExitOk);
  REQUIRE(run(c).code == kExitOk);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a.schema") == slurp(dir / "b.schema"));
  CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));
  // the file is ordinary csv
  const auto table = read_csv_file(dir / "a.csv");
  CHECK(table.row_count() == 500);
}

TEST_CASE("simulate then fit recovers the parameters") {
  TempDir dir("fit");
  REQUIRE(run({"simulate", "--beta", "0.5,-1.0,0.25", "--n", "5000", "--family", "binary", "--out",
               dir / "d"})
              .code == kExitOk);
  const auto r = run({"fit", "--data", dir / "d.csv", "--schema", dir / "d.schema", "--out", dir / "f"});
  REQUIRE(r.code == kExitOk);
  const auto json = nlohmann::json::parse(slurp(dir / "f.json"));
  const double truth[3] = {0.5, -1.0, 0.25};
  int l = 0;
  for (const auto& row : json["coefficients"]) {
    CHECK(std::fabs(row["estimate"].get<double>() - truth[l]) < 3 * row["se"].get<double>());
    ++l;
  }
  CHECK(l == 3);
  CHECK(json["model"]["family"] == "binary");
  CHECK(slurp(dir / "f.txt") == r.out);

  // same inputs, same bytes
  REQUIRE(run({"fit", "--data", dir / "d.csv", "--schema", dir / "d.schema", "--out", dir / "g"}).code ==
          kExitOk);
  CHECK(slurp(dir / "f.json") == slurp(dir / "g.json"));
  CHECK(slurp(dir / "f.txt") == slurp(dir / "g.txt"));
}

TEST_CASE("exit codes") {
  TempDir dir("codes");
  REQUIRE(run({"simulate", "--beta", "0.2,1.5,-2.0", "--n", "400", "--link", "logit", "--family",
               "binary", "--out", dir / "d"})
              .code == kExitOk);

  const auto missing = run({"fit", "--data", dir / "d.csv", "--schema", dir / "nope.schema", "--out",
                            dir / "f"});
  CHECK(missing.code == kExitInputError);
  CHECK(missing.err.find(dir / "nope.schema") != std::string::npos);

  const auto no_data = run({"fit", "--data", dir / "none.csv", "--schema", dir / "d.schema", "--out",
                            dir / "f"});
  CHECK(no_data.code == kExitInputError);
  CHECK(no_data.err.find(dir / "none.csv") != std::string::npos);

  const auto slow = run({"fit", "--data", dir / "d.csv", "--schema", dir / "d.schema", "--out",
                         dir / "slow", "--max-iter", "1", "--link", "logit"});
  CHECK(slow.code == kExitNotConverged);
  CHECK(fs::exists(dir / "slow.txt"));
  CHECK(fs::exists(dir / "slow.json"));
  CHECK(nlohmann::json::parse(slurp(dir / "slow.json"))["converged"] == false);

  CHECK(run({"fit", "--bogus"}).code == kExitInputError);
  CHECK(run({}).code == kExitInputError);
  CHECK(run({"simulate", "--beta", "0.1", "--cutpoints", "1.0,0.5", "--out", dir / "bad"}).code ==
        kExitInputError);
  CHECK(run({"simulate", "--beta", "0.1", "--cutpoints", "-1.0", "--out", dir / "bad"}).code ==
        kExitInputError);
  CHECK(run({"fit", "--data", dir / "d.csv", "--schema", dir / "d.schema", "--out", dir / "x",
             "--link", "cauchit"})
            .code == kExitInputError);
  CHECK(run({"bayes", "--data", dir / "d.csv", "--schema", dir / "d.schema", "--out", dir / "x",
             "--link", "logit"})
            .code == kExitInputError);
}

TEST_CASE("separated data exit with a separation diagnostic") {
  TempDir dir("sep");
  std::string csv = "y,x\n";
  for (int i = 0; i < 30; ++i) csv += (i < 15 ? "no," : "yes,") + std::to_string(i) + "\n";
  spit(dir / "s.csv", csv);
  spit(dir / "s.schema", "response = y\nlabels = no | yes\ncovariate.x = continuous\n");
  const auto r = run({"fit", "--data", dir / "s.csv", "--schema", dir / "s.schema", "--out", dir / "f"});
  CHECK(r.code == kExitInputError);
  CHECK(r.err.find("separation") != std::string::npos);
}

TEST_CASE("data errors carry record and column context") {
  TempDir dir("ctx");
  spit(dir / "d.csv", "y,x\nno,1\nyes,2\nmaybe,3\n");
  spit(dir / "d.schema", "response = y\nlabels = no | yes\ncovariate.x = continuous\n");
  const auto r = run({"fit", "--data", dir / "d.csv", "--schema", dir / "d.schema", "--out", dir / "f"});
  CHECK(r.code == kExitInputError);
  CHECK(r.err.find("record 4") != std::string::npos);
  CHECK(r.err.find("maybe") != std::string::npos);

  spit(dir / "bad.schema", "response = y\nlabels = no | yes\ncovariate.x = quadratic\n");
  const auto s = run({"fit", "--data", dir / "d.csv", "--schema", dir / "bad.schema", "--out", dir / "f"});
  CHECK(s.code == kExitInputError);
  CHECK(s.err.find("line 3") != std::string::npos);
}

TEST_CASE("effects end to end") {
  TempDir dir("eff");
  std::string csv = "y,age,group\n";
  RandomStream rng(4);
  for (int i = 0; i < 800; ++i) {
    const double age = 20 + 50 * rng.uniform();
    const bool treated = rng.uniform() < 0.5;
    const double latent = -1.5 + 0.03 * age + 0.6 * treated + rng.normal();
    const char* y = latent <= 0 ? "low" : latent <= 1 ? "mid" : "high";
    csv += std::string(y) + "," + std::to_string(age) + "," + (treated ? "T" : "C") + "\n";
  }
  spit(dir / "d.csv", csv);
  spit(dir / "d.schema",
       "response = y\nlabels = low | mid | high\ncovariate.age = continuous\ncovariate.group = categorical:C\n");
  const auto r = run({"effects", "--data", dir / "d.csv", "--schema", dir / "d.schema", "--out", dir / "e",
                      "--scale", "age=10"});
  REQUIRE(r.code == kExitOk);
  const auto json = nlohmann::json::parse(slurp(dir / "e.json"));
  CHECK(json["categories"] == nlohmann::json::array({"low", "mid", "high"}));
  REQUIRE(json["effects"].size() == 2);
  CHECK(json["effects"][0]["label"] == "age, 10 units");
  CHECK(json["effects"][1]["covariate"] == "group=T");
  CHECK(json["effects"][1]["kind"] == "indicator");
  for (const auto& row : json["effects"]) {
    double sum = 0.0;
    for (const auto& v : row["average_effect"]) sum += v.get<double>();
    CHECK(std::fabs(sum) < 1e-10);
    // positive coefficients: lowest category falls, highest rises
    CHECK(row["average_effect"][0].get<double>() < 0.0);
    CHECK(row["average_effect"][2].get<double>() > 0.0);
    const auto tokens = row_tokens(slurp(dir / "e.txt"), row["label"].get<std::string>());
    REQUIRE(tokens.size() == 3);
    for (int j = 0; j < 3; ++j) CHECK(tokens[static_cast<std::size_t>(j)] == fixed4(row["average_effect"][j].get<double>()));
  }

  const auto intercept = run({"effects", "--data", dir / "d.csv", "--schema", dir / "d.schema", "--out",
                              dir / "e2", "--covariate", "intercept"});
  CHECK(intercept.code == kExitInputError);
  const auto unknown = run({"effects", "--data", dir / "d.csv", "--schema", dir / "d.schema", "--out",
                            dir / "e3", "--covariate", "height"});
  CHECK(unknown.code == kExitInputError);

  // an impossible p threshold filters every row
  const auto filtered = run({"effects", "--data", dir / "d.csv", "--schema", dir / "d.schema", "--out",
                             dir / "e4", "--pfilter", "1e-300"});
  REQUIRE(filtered.code == kExitOk);
  CHECK(nlohmann::json::parse(slurp(dir / "e4.json"))["effects"].empty());
}

TEST_CASE("bayes end to end") {
  TempDir dir("bayes");
  REQUIRE(run({"simulate", "--beta", "0.3,0.8", "--cutpoints", "1.0", "--n", "400", "--out", dir / "d"})
              .code == kExitOk);
  const std::vector<std::string> args = {"bayes", "--data", dir / "d.csv", "--schema", dir / "d.schema",
                                         "--draws", "600", "--burn", "100", "--seed", "5"};
  auto a = args, b = args;
  a.insert(a.end(), {"--out", dir / "a"});
  b.insert(b.end(), {"--out", dir / "b"});
  REQUIRE(run(a).code == kExitOk);
  REQUIRE(run(b).code == kExitOk);
  CHECK(slurp(dir / "a_chain.csv") == slurp(dir / "b_chain.csv"));
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  const auto json = nlohmann::json::parse(slurp(dir / "a.json"));
  CHECK(json["seed"] == 5);
  CHECK(json["draws"] == 600);
  CHECK(json["parameters"].size() == 4);
  CHECK(read_csv_file(dir / "a_chain.csv").row_count() == 600);

  auto too_few = args;
  too_few[6] = "150";
  too_few.insert(too_few.end(), {"--out", dir / "c"});
  CHECK(run(too_few).code == kExitInputError);
}

}  // TEST_SUITE
