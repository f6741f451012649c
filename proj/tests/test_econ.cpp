#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dqa/domain.hpp"
#include "dqa/econ.hpp"
#include "dqa/stats.hpp"
#include "oracles.hpp"

using namespace dqa;

TEST_CASE("brute-force precision") {
  CHECK(brute_force_precision(345, 1000) == 0.345);
  CHECK(brute_force_precision(0, 17) == 0.0);
  CHECK(brute_force_precision(17, 17) == 1.0);
  CHECK_THROWS_AS(brute_force_precision(1, 0), Error);
  CHECK_THROWS_AS(brute_force_precision(11, 10), Error);
}

TEST_CASE("normal quantile agrees with erfc bisection") {
  for (double p : {0.5, 0.9, 0.95, 0.975, 0.99, 0.001, 0.2}) {
    CHECK(std::abs(normal_quantile(p) - oracle::normal_quantile_bisect(p)) < 1e-9);
  }
  CHECK(student_t_quantile(0.975, 1e7) == doctest::Approx(normal_quantile(0.975)).epsilon(1e-6));
  CHECK(student_t_quantile(0.975, 12) == doctest::Approx(2.1788128296634177).epsilon(1e-10));
}

TEST_CASE("impression bound") {
  const double z = oracle::normal_quantile_bisect(0.975) + oracle::normal_quantile_bisect(0.9);
  const double constant = (z / 0.05) * (z / 0.05);
  CHECK(std::abs(impressions_constant() - constant) < 1e-6);
  CHECK(std::abs(impressions_constant() - 4202.969) < 0.01);

  CHECK(required_impressions(2) == 1051);
  CHECK(required_impressions(10) == 379);
  for (int c = 2; c <= 100; ++c) {
    const auto expected = static_cast<std::int64_t>(std::ceil(4202.969 * (1.0 / c) * (1.0 - 1.0 / c)));
    CHECK(required_impressions(c) == expected);
    if (c > 2) CHECK(required_impressions(c) <= required_impressions(c - 1));
  }
  CHECK(required_impressions(3) < required_impressions(2));
  // Looser margin needs fewer impressions.
  CHECK(required_impressions(2, 0.1) < required_impressions(2, 0.05));
  CHECK_THROWS_AS(required_impressions(1), Error);
  CHECK_THROWS_AS(required_impressions(2, 0.0), Error);
  CHECK_THROWS_AS(required_impressions(2, 0.05, 1.0), Error);

  const auto plan = plan_sample_size(4);
  CHECK(plan.required_impressions == required_impressions(4));
  CHECK(plan.power == 0.9);
}

TEST_CASE("evaluation cost") {
  CHECK(total_evaluation_cost(1, 2, 0.001) == doctest::Approx(1.051));
  CHECK(total_evaluation_cost(200000, 2, 0.001) == doctest::Approx(210200.0));
  CHECK_THROWS_AS(total_evaluation_cost(0, 2, 0.001), Error);
  CHECK_THROWS_AS(total_evaluation_cost(1, 2, -1.0), Error);
}

TEST_CASE("data cost break-even") {
  CHECK(max_data_cpi(1.0, 0.6, 0.4) == doctest::Approx(0.5));
  CHECK(max_data_cpi(3.0, 0.4, 0.4) == 0.0);
  CHECK(max_data_cpi(1.0, 0.3, 0.4) == doctest::Approx(-0.25));
  for (double cpi : {0.1, 0.7, 2.5}) {
    CHECK(max_data_cpi(2 * cpi, 0.7, 0.3) == doctest::Approx(2 * max_data_cpi(cpi, 0.7, 0.3)));
  }
  try {
    max_data_cpi(1.0, 0.5, 0.0);
    FAIL("expected ZeroFreePrecision");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroFreePrecision);
  }
}

TEST_CASE("category forecast") {
  const PrecisionTable table = {{"a", 0.4}, {"b", 0.8}, {"c", 0.1}, {"one", 1.0}};
  CHECK(forecast_category({{"one"}, {"one"}, {"one"}}, table, Combiner::Mean) == 3.0);
  CHECK(forecast_category({{"a"}, {"a", "b"}}, table, Combiner::Mean) == doctest::Approx(1.0));
  CHECK(forecast_category({{"a"}, {"a", "b"}}, table, Combiner::Max) == doctest::Approx(1.2));
  CHECK(forecast_category({{"a"}, {"a", "b"}}, table, Combiner::Min) == doctest::Approx(0.8));
  CHECK(forecast_category({{"a", "b", "c"}}, table, Combiner::Median) == doctest::Approx(0.4));
  CHECK(forecast_category({{"a", "b"}}, table, Combiner::Median) == doctest::Approx(0.6));
  CHECK(forecast_category({}, table, Combiner::Mean) == 0.0);
  CHECK(forecast_category({{}, {"b"}}, table, Combiner::Mean) == doctest::Approx(0.8));
  CHECK_THROWS_AS(forecast_category({{"zzz"}}, table, Combiner::Mean), Error);
  CHECK(parse_combiner("median") == Combiner::Median);
  CHECK_THROWS_AS(parse_combiner("mode"), Error);
}

TEST_CASE("forecast is monotone in the table and bounded by the user count") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 3);
  const std::string names[] = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 100; ++trial) {
    PrecisionTable table;
    for (const auto& n : names) table[n] = u(rng);
    std::vector<std::vector<std::string>> users(50);
    for (auto& tags : users) {
      const int count = pick(rng);
      for (int i = 0; i < count; ++i) tags.push_back(names[pick(rng)]);
    }
    for (auto comb : {Combiner::Max, Combiner::Min, Combiner::Mean, Combiner::Median}) {
      const double base = forecast_category(users, table, comb);
      CHECK(base >= 0.0);
      CHECK(base <= 50.0);
      PrecisionTable raised = table;
      raised[names[pick(rng)]] = std::min(1.0, raised[names[pick(rng)]] + 0.2);
      for (const auto& n : names) raised[n] = std::max(raised[n], table[n]);
      CHECK(forecast_category(users, raised, comb) >= base - 1e-12);
    }
  }
}

TEST_CASE("forecast matches a simulated population within 3 sigma") {
  // Single-tag users whose true membership is drawn with the table's precision.
  const PrecisionTable table = {{"a", 0.3}, {"b", 0.75}, {"c", 0.55}};
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 2);
  const std::string names[] = {"a", "b", "c"};
  std::vector<std::vector<std::string>> users;
  double members = 0.0, variance = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const auto& tag = names[pick(rng)];
    users.push_back({tag});
    const double p = table.at(tag);
    members += u(rng) < p ? 1.0 : 0.0;
    variance += p * (1 - p);
  }
  const double forecast = forecast_category(users, table, Combiner::Mean);
  CHECK(std::abs(forecast - members) <= 3.0 * std::sqrt(variance));
}
