#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include <Eigen/Dense>

#include "dqa/experiment.hpp"
#include "dqa/infer.hpp"
#include "dqa/simulate.hpp"
#include "dqa/stats.hpp"
#include "oracles.hpp"

using namespace dqa;

namespace {

std::vector<CampaignAggregate> noiseless(const PredictiveValues& p,
                                         const std::vector<Eigen::Vector3d>& designs) {
  std::vector<CampaignAggregate> out;
  for (std::size_t i = 0; i < designs.size(); ++i) {
    out.push_back(expected_aggregate(p, designs[i], "c" + std::to_string(i)));
  }
  return out;
}

const std::vector<Eigen::Vector3d> kThree = {{40, 30, 30}, {20, 50, 30}, {30, 20, 50}};

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("noiseless campaigns recover the study profiles exactly") {
  for (const auto& profile : {high_quality_profile(), low_quality_profile()}) {
    const auto sol = infer_predictive_values(QpProblem{noiseless(profile, kThree), 1.0, true});
    CHECK(sol.converged);
    CHECK(sol.unique);
    CHECK((sol.values.p - profile.p).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(sol.objective <= 1e-10);
    CHECK(sol.residuals.size() == 3);
  }
}

TEST_CASE("identity fits campaigns whose source view equals the truth") {
  std::vector<CampaignAggregate> cs;
  for (const auto& d : kThree) {
    CampaignAggregate c;
    c.campaign_id = "c";
    c.source = d;
    c.truth = d;
    c.population = d.sum();
    cs.push_back(c);
  }
  for (double xi : {0.0, 0.05, 1.0}) {
    const auto sol = infer_predictive_values(QpProblem{cs, xi, true});
    CHECK(sol.objective <= 1e-12);
    CHECK((sol.values.p - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("problem validation") {
  const auto two = noiseless(high_quality_profile(), {{40, 30, 30}, {20, 50, 30}});
  CHECK(code_of([&] { infer_predictive_values(QpProblem{two, 1.0, true}); }) ==
        ErrorCode::TooFewCampaigns);

  auto cs = noiseless(high_quality_profile(), {{40, 30, 30}, {20, 50, 30}, {60, 60, 80}});
  CHECK(code_of([&] { infer_predictive_values(QpProblem{cs, 1.0, false}); }) ==
        ErrorCode::UnequalPopulations);
  CHECK_NOTHROW(infer_predictive_values(QpProblem{cs, 1.0, true}));
  CHECK(code_of([&] { infer_predictive_values(QpProblem{cs, -0.1, true}); }) ==
        ErrorCode::InvalidParameters);
}

TEST_CASE("exact recovery for random profiles and designs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> kdist(3, 10);
  for (int inst = 0; inst < 100; ++inst) {
    const PredictiveValues p(oracle::random_profile(rng));
    const double gap = std::abs(p.p(0, 0) - p.p(1, 1));
    const double xi = inst % 2 == 0 ? 1.0 : gap;  // odd instances sit on the band edge
    std::vector<Eigen::Vector3d> designs;
    const int k = kdist(rng);
    for (int i = 0; i < k; ++i) designs.emplace_back(5 + 95 * u(rng), 5 + 95 * u(rng), 5 + 95 * u(rng));
    const auto sol = infer_predictive_values(QpProblem{noiseless(p, designs), xi, true});
    CHECK((sol.values.p - p.p).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(sol.values.is_valid(1e-9));
    CHECK(sol.values.is_unbiased(xi, 1e-9));
  }
}

TEST_CASE("solution does not depend on campaign order") {
  auto cs = simulate_campaigns(high_quality_profile(), SplitSpec{}, 8, 0.0, 77);
  const auto a = infer_predictive_values(QpProblem{cs, 0.05, true});
  std::reverse(cs.begin(), cs.end());
  std::rotate(cs.begin(), cs.begin() + 3, cs.end());
  const auto b = infer_predictive_values(QpProblem{cs, 0.05, true});
  CHECK((a.values.p - b.values.p).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
}

TEST_CASE("normalization makes a doubled campaign equivalent to a duplicate") {
  const auto base = simulate_campaigns(low_quality_profile(), SplitSpec{}, 5, 0.0, 31);
  auto dup = base;
  dup.push_back(base[2]);
  auto doubled = base;
  doubled.push_back(base[2].scaled(2.0));
  const auto a = infer_predictive_values(QpProblem{dup, 1.0, true});
  const auto b = infer_predictive_values(QpProblem{doubled, 1.0, true});
  CHECK((a.values.p - b.values.p).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("unnormalized fit equals normalized fit for equal sizes") {
  const auto cs = simulate_campaigns(high_quality_profile(), SplitSpec{}, 6, 0.0, 12);
  const auto a = infer_predictive_values(QpProblem{cs, 1.0, true});
  const auto b = infer_predictive_values(QpProblem{cs, 1.0, false});
  CHECK((a.values.p - b.values.p).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(b.objective == doctest::Approx(a.objective * 100.0 * 100.0).epsilon(1e-8));
}

TEST_CASE("degenerate design is flagged as non-unique") {
  const auto cs = noiseless(high_quality_profile(), {{40, 30, 30}, {40, 30, 30}, {80, 60, 60}});
  const auto sol = infer_predictive_values(QpProblem{cs, 1.0, true});
  CHECK_FALSE(sol.unique);
  CHECK(sol.values.is_valid());
  CHECK(sol.objective <= 1e-12);
}

TEST_CASE("estimate_positives_inferred") {
  CHECK(estimate_positives_inferred(PredictiveValues::identity(), {7, 8, 9}) == 7.0);
  CHECK(estimate_positives_inferred(high_quality_profile(), {40, 30, 30}) ==
        doctest::Approx(50.0).epsilon(1e-12));
  CHECK(estimate_positives_inferred(high_quality_profile(), Eigen::Vector3d::Zero()) == 0.0);
}

TEST_CASE("confidence intervals: degenerate cases") {
  QpProblem exact{noiseless(high_quality_profile(),
                            {{40, 30, 30}, {20, 50, 30}, {30, 20, 50}, {50, 25, 25}}),
                  1.0, true};
  const auto sol = infer_predictive_values(exact);
  const Eigen::Matrix3d hw = confidence_interval(sol, exact, 0.05);
  CHECK(hw.cwiseAbs().maxCoeff() < 1e-6);

  QpProblem three{noiseless(high_quality_profile(), kThree), 1.0, true};
  CHECK(code_of([&] { confidence_interval(infer_predictive_values(three), three, 0.05); }) ==
        ErrorCode::InsufficientDof);
  CHECK(code_of([&] { confidence_interval(sol, exact, 1.5); }) == ErrorCode::InvalidParameters);
}

TEST_CASE("standard errors match the sampling spread under the regression noise model") {
  // Noise on (g+, g-) with covariance sigma^2 W^{-1}, W = [[2,1],[1,2]], and
  // g_unknown absorbing the rest. The exact standard deviation of the alpha_1
  // estimate is sigma * sqrt((2/3) [(D^T D)^{-1}]_00).
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z(0.0, 1.0);
  const PredictiveValues truth = high_quality_profile();
  std::vector<Eigen::Vector3d> designs;
  for (int i = 0; i < 9; ++i) {
    Eigen::Vector3d d(1.0 + (7 * i) % 5, 2.0 + (3 * i) % 4, 1.5 + (5 * i) % 3);
    designs.push_back(d / d.sum());
  }
  Eigen::MatrixX3d dm(9, 3);
  for (int i = 0; i < 9; ++i) dm.row(i) = designs[i].transpose();
  const double sigma = 0.002;
  const double exact_sd = sigma * std::sqrt((2.0 / 3.0) * (dm.transpose() * dm).inverse()(0, 0));

  Eigen::Matrix2d cov;
  cov << 2.0, -1.0, -1.0, 2.0;
  const Eigen::Matrix2d chol = (cov / 3.0).llt().matrixL();
  const double tq = student_t_quantile(0.975, 12);

  std::vector<double> estimates;
  double mean_s = 0.0;
  const int reps = 2000;
  for (int r = 0; r < reps; ++r) {
    auto cs = noiseless(truth, designs);
    for (auto& c : cs) {
      const Eigen::Vector2d e = sigma * chol * Eigen::Vector2d(z(rng), z(rng));
      c.truth(0) += e(0);
      c.truth(1) += e(1);
      c.truth(2) -= e(0) + e(1);
    }
    QpProblem prob{cs, 1.0, true};
    const auto sol = infer_predictive_values(prob);
    estimates.push_back(sol.values.precision());
    mean_s += confidence_interval(sol, prob, 0.05)(0, 0) / tq / reps;
  }
  const double m = mean(estimates);
  double var = 0.0;
  for (double e : estimates) var += (e - m) * (e - m) / (reps - 1);
  CHECK(std::sqrt(var) == doctest::Approx(exact_sd).epsilon(0.05));
  // E[s] is slightly below the true sd for 12 dof (c4 factor ~0.98).
  CHECK(mean_s == doctest::Approx(exact_sd).epsilon(0.05));
  CHECK(m == doctest::Approx(0.8).epsilon(0.01));
}

TEST_CASE("assess_sources ranks and fills reports") {
  std::map<std::string, std::vector<CampaignAggregate>> sources;
  sources["hq"] = simulate_campaigns(high_quality_profile(), SplitSpec{}, 5, 0.0, 1);
  sources["three"] = simulate_campaigns(low_quality_profile(), SplitSpec{}, 3, 0.0, 2);
  const auto reports = assess_sources(sources, 1.0, 0.05);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].rank == 1);
  CHECK(reports[1].rank == 2);
  CHECK(reports[0].mean_relative_err <= reports[1].mean_relative_err);
  for (const auto& r : reports) {
    CHECK(r.inferred.has_value());
    CHECK(r.ci_half_widths.has_value() == (r.n_campaigns >= 4));
    CHECK(r.ci_level == doctest::Approx(0.95));
  }
}
