#include <doctest.h>

#include <cmath>

#include "dchoice/effects.hpp"
#include "dchoice/errors.hpp"
#include "dchoice/estimation.hpp"
#include "oracles.hpp"

using namespace dchoice;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

// intercept, a continuous column and a 0/1 column
Dataset mixed_data(int categories, int n, std::uint64_t seed) {
  RandomStream rng(seed);
  Eigen::MatrixXd x(n, 3);
  std::vector<int> y;
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = 2.0 * rng.normal();
    x(i, 2) = rng.uniform() < 0.4 ? 1.0 : 0.0;
    y.push_back(1 + i % categories);
  }
  return Dataset(y, x, {"intercept", "age", "male"},
                 {ColumnKind::intercept, ColumnKind::continuous, ColumnKind::indicator}, categories);
}

ModelSpec spec_for(int J, Link link) {
  return make_spec(J == 2 ? Family::binary : Family::ordinal, link, J, 3);
}

ParamVector params_for(int J, double b1, double b2) {
  Eigen::VectorXd delta(J - 2);
  for (Eigen::Index j = 0; j < delta.size(); ++j) delta[j] = 0.2 - 0.3 * static_cast<double>(j);
  return ParamVector{vec({0.4, b1, b2}), delta};
}

}  // namespace

TEST_SUITE("effects") {

TEST_CASE("continuous effect at zero index is beta times the density at zero") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 0, 1, 0, 1, 0;
  const Dataset data({1, 2, 1}, x, {"intercept", "x"}, {ColumnKind::intercept, ColumnKind::continuous}, 2);
  const auto spec = make_spec(Family::binary, Link::probit, 2, 2);
  const auto ce = ce_continuous(spec, ParamVector{vec({0.0, 0.5}), Eigen::VectorXd()}, data, 1);
  const double expected = 0.5 / std::sqrt(2.0 * M_PI);
  CHECK(ce.average[1] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(ce.average[1] == doctest::Approx(0.19947114020071634).epsilon(1e-15));
  CHECK(ce.average[0] == doctest::Approx(-expected).epsilon(1e-15));
  CHECK(ce.per_observation.rows() == 3);
}

TEST_CASE("continuous effect matches finite differences of predict_prob") {
  for (Link link : {Link::probit, Link::logit}) {
    for (int J : {2, 3, 5}) {
      const auto spec = spec_for(J, link);
      const auto data = mixed_data(J, 40, 10 + J);
      const auto p = params_for(J, -0.7, 0.9);
      const auto ce = ce_continuous(spec, p, data, 1);
      const double h = 1e-6;
      Eigen::MatrixXd up = data.x(), dn = data.x();
      up.col(1).array() += h;
      dn.col(1).array() -= h;
      const Eigen::MatrixXd fd = (predict_prob(spec, p, up) - predict_prob(spec, p, dn)) / (2 * h);
      CHECK((ce.per_observation - fd).cwiseAbs().maxCoeff() < 1e-6);
      CHECK((ce.average - Eigen::RowVectorXd(fd.colwise().mean())).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("indicator effect equals the explicit two-evaluation difference") {
  for (Link link : {Link::probit, Link::logit}) {
    for (int J : {2, 3, 4}) {
      const auto spec = spec_for(J, link);
      const auto data = mixed_data(J, 40, 20 + J);
      const auto p = params_for(J, 0.3, -1.1);
      const auto ce = ce_indicator(spec, p, data, 2);
      Eigen::MatrixXd on = data.x(), off = data.x();
      on.col(2).setOnes();
      off.col(2).setZero();
      const Eigen::MatrixXd direct = predict_prob(spec, p, on) - predict_prob(spec, p, off);
      CHECK(ce.per_observation == direct);
    }
  }
}

TEST_CASE("indicator effect examples") {
  const auto data = mixed_data(3, 30, 1);
  const auto spec = spec_for(3, Link::probit);
  const auto zero = ce_indicator(spec, params_for(3, 0.5, 0.0), data, 2);
  CHECK((zero.per_observation.array() == 0.0).all());

  Eigen::MatrixXd x(2, 2);
  x << 1, 0, 1, 1;
  const Dataset bin_data({1, 2}, x, {"intercept", "d"}, {ColumnKind::intercept, ColumnKind::indicator}, 2);
  const auto bin = make_spec(Family::binary, Link::probit, 2, 2);
  const auto ce = ce_indicator(bin, ParamVector{vec({0.0, 1.0}), Eigen::VectorXd()}, bin_data, 1);
  const double expected = oracle::phi_series(1.0) - 0.5;
  CHECK(ce.average[1] == doctest::Approx(expected).epsilon(1e-14));
  CHECK(ce.average[1] == doctest::Approx(0.3413447460685429).epsilon(1e-14));
  // the contrast is the same whether or not the observation already has d = 1
  CHECK(ce.per_observation(0, 1) == ce.per_observation(1, 1));
}

TEST_CASE("effects sum to zero across categories") {
  for (Link link : {Link::probit, Link::logit}) {
    for (int J : {2, 3, 6}) {
      const auto spec = spec_for(J, link);
      const auto data = mixed_data(J, 50, 30 + J);
      const auto p = params_for(J, 1.3, -0.6);
      for (const auto& ce : {ce_continuous(spec, p, data, 1), ce_indicator(spec, p, data, 2)}) {
        CHECK(ce.per_observation.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::fabs(ce.average.sum()) < 1e-10);
      }
    }
  }
}

TEST_CASE("sign law on the extreme categories") {
  for (Link link : {Link::probit, Link::logit}) {
    for (int J : {3, 4}) {
      const auto spec = spec_for(J, link);
      const auto data = mixed_data(J, 50, 40 + J);
      for (double b : {0.8, -0.45}) {
        const auto p = params_for(J, b, b);
        for (const auto& ce : {ce_continuous(spec, p, data, 1), ce_indicator(spec, p, data, 2)}) {
          for (Eigen::Index i = 0; i < data.rows(); ++i) {
            CHECK(std::signbit(ce.per_observation(i, 0)) == (b > 0));
            CHECK(std::signbit(ce.per_observation(i, J - 1)) == (b < 0));
          }
        }
      }
    }
  }
}

TEST_CASE("kind errors") {
  const auto data = mixed_data(3, 20, 2);
  const auto spec = spec_for(3, Link::probit);
  const auto p = params_for(3, 0.5, 0.5);
  CHECK_THROWS_AS(ce_continuous(spec, p, data, 0), KindError);
  CHECK_THROWS_AS(ce_indicator(spec, p, data, 0), KindError);
  CHECK_THROWS_AS(ce_continuous(spec, p, data, 2), KindError);
  CHECK_THROWS_AS(ce_indicator(spec, p, data, 1), KindError);
  CHECK_THROWS_AS(ce_continuous(spec, p, data, 3), DomainError);
}

TEST_CASE("odds ratios") {
  const auto logit = make_spec(Family::binary, Link::logit, 2, 2);
  CHECK(odds_ratio_logit(logit, ParamVector{vec({0.3, 0.0}), Eigen::VectorXd()}, 1) == 1.0);
  CHECK(odds_ratio_logit(logit, ParamVector{vec({0.3, std::log(2.0)}), Eigen::VectorXd()}, 1) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK(odds_ratio_logit(logit, ParamVector{vec({0.3, -std::log(2.0)}), Eigen::VectorXd()}, 1) ==
        doctest::Approx(0.5).epsilon(1e-15));
  const auto probit = make_spec(Family::binary, Link::probit, 2, 2);
  CHECK_THROWS_AS(odds_ratio_logit(probit, ParamVector{vec({0.3, 0.1}), Eigen::VectorXd()}, 1),
                  DomainError);
}

TEST_CASE("cumulative odds") {
  const auto spec = make_spec(Family::ordinal, Link::logit, 4, 2);
  const ParamVector zero{vec({0.0, 0.0}), vec({0.1, -0.2})};
  CHECK(cumulative_odds(spec, zero, vec({1.0, 3.0}), 1) == 1.0);

  const ParamVector p{vec({0.4, -0.9}), vec({0.1, -0.2})};
  const auto x1 = vec({1.0, 0.7}), x2 = vec({1.0, -1.6});
  const double expected = std::exp(-(x1 - x2).dot(p.beta));
  Eigen::MatrixXd xs(2, 2);
  xs.row(0) = x1.transpose();
  xs.row(1) = x2.transpose();
  const auto probs = predict_prob(spec, p, xs);
  for (int j = 1; j <= 3; ++j) {
    CHECK(cumulative_odds(spec, p, x1, j) / cumulative_odds(spec, p, x2, j) ==
          doctest::Approx(expected).epsilon(1e-12));
    for (int r = 0; r < 2; ++r) {
      const double from_probs = probs.row(r).head(j).sum() / probs.row(r).tail(4 - j).sum();
      CHECK(cumulative_odds(spec, p, r == 0 ? x1 : x2, j) == doctest::Approx(from_probs).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(cumulative_odds(spec, p, x1, 4), DomainError);
  CHECK_THROWS_AS(cumulative_odds(spec, p, x1, 0), DomainError);
  CHECK_THROWS_AS(cumulative_odds(make_spec(Family::ordinal, Link::probit, 4, 2), p, x1, 1),
                  DomainError);
}

TEST_CASE("effects_table scales and labels rows") {
  const auto data = mixed_data(3, 60, 3);
  const auto spec = spec_for(3, Link::probit);
  const auto p = params_for(3, 0.05, 0.7);
  const auto table = effects_table(spec, p, data, {{2, 1.0}, {1, 10.0}}, {"a", "b", "c"});
  REQUIRE(table.rows.size() == 2);
  CHECK(table.categories == std::vector<std::string>{"a", "b", "c"});
  CHECK(table.rows[0].name == "male");
  CHECK(table.rows[0].kind == EffectKind::indicator);
  CHECK(table.rows[0].average == ce_indicator(spec, p, data, 2).average);
  CHECK(table.rows[1].label == "age, 10 units");
  CHECK(table.rows[1].scale == 10.0);
  CHECK((table.rows[1].average - 10.0 * ce_continuous(spec, p, data, 1).average).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(effects_table(spec, p, data, {{0, 1.0}}, {"a", "b", "c"}), KindError);
}

}  // TEST_SUITE
