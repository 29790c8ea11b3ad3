#include "voipqoe/surface_fit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>
#include <gtest/gtest.h>

namespace voipqoe {
namespace {

std::vector<Sample> grid_samples(const TermSet& terms, const Eigen::VectorXd& coef) {
  std::vector<Sample> out;
  for (int d = 0; d <= 400; d += 50) {
    for (int p = 0; p <= 10; ++p) out.push_back({double(p), double(d), evaluate_surface(terms, coef, double(p), double(d))});
  }
  return out;
}

Eigen::MatrixXd design_of(const std::vector<Sample>& samples, const TermSet& terms) {
  Eigen::MatrixXd x(samples.size(), terms.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t k = 0; k < terms.size(); ++k) {
      x(i, k) = std::pow(samples[i].x, terms.terms()[k].x_power) * std::pow(samples[i].y, terms.terms()[k].y_power);
    }
  }
  return x;
}

Eigen::VectorXd values_of(const std::vector<Sample>& samples) {
  Eigen::VectorXd v(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) v(i) = samples[i].value;
  return v;
}

// Coefficients with magnitudes comparable to a bias surface on this grid.
Eigen::VectorXd typical_coefficients(const TermSet& terms) {
  Eigen::VectorXd c(terms.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& m = terms.terms()[k];
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    c(k) = sign * (1.0 + 0.3 * k) / (std::pow(10.0, m.x_power) * std::pow(400.0, m.y_power));
  }
  return c;
}

TEST(TermSetTest, PresetShapes) {
  EXPECT_EQ(TermSet::poly31().size(), 7u);
  EXPECT_EQ(TermSet::poly23().size(), 9u);
  EXPECT_EQ(TermSet::poly32().size(), 9u);
  EXPECT_EQ(TermSet::poly33().size(), 10u);
  for (const auto& t : {TermSet::poly31(), TermSet::poly23(), TermSet::poly32(), TermSet::poly33()}) {
    EXPECT_TRUE(t.has_intercept());
    EXPECT_EQ(TermSet::from_name(t.name()), t);
  }
  EXPECT_EQ(TermSet::poly23().term_label(6), "x^2*y");
  EXPECT_EQ(TermSet::poly23().term_label(0), "1");
  EXPECT_THROW(TermSet("dup", {{1, 0}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(TermSet::from_name("poly44"), ConfigError);
}

TEST(EvaluateSurfaceTest, Examples) {
  EXPECT_DOUBLE_EQ(evaluate_surface(TermSet::poly23(), BiasPolynomial::g729_thai().coefficients, 0.0, 0.0), 0.4327);
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(10);
  EXPECT_EQ(evaluate_surface(TermSet::poly33(), zeros, 3.7, -12.0), 0.0);
  EXPECT_NEAR(evaluate_surface(TermSet::poly31(), SubjectiveSurface::g729_thai().coefficients, 0.02, 0.0), 3.869, 0.001);
  EXPECT_NEAR(evaluate_surface(TermSet::poly31(), SubjectiveSurface::g729_thai().coefficients, 0.02, 0.0),
              subjective_mos(NetworkCondition(2, 0), SubjectiveSurface::g729_thai()), 1e-15);
  EXPECT_THROW(evaluate_surface(TermSet::poly23(), zeros, 1.0, 1.0), std::invalid_argument);
}

TEST(EvaluateSurfaceTest, ScalarGeneric) {
  const std::vector<float> c = {1.0f, 2.0f, 3.0f, 0.5f, 0.0f, 0.0f, 0.0f};
  EXPECT_FLOAT_EQ(evaluate_surface(TermSet::poly31(), std::span<const float>(c), 2.0f, 1.0f), 1 + 4 + 3 + 2);
}

TEST(FitSurfaceTest, ExactRecoveryForEveryPreset) {
  for (const auto& terms : {TermSet::poly31(), TermSet::poly23(), TermSet::poly32(), TermSet::poly33()}) {
    const auto truth = typical_coefficients(terms);
    const auto fit = fit_surface(grid_samples(terms, truth), terms);
    EXPECT_LE((fit.coefficients - truth).cwiseAbs().maxCoeff(), 1e-8) << terms.name();
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-8);
    EXPECT_NEAR(fit.rmse, 0.0, 1e-8);
    EXPECT_EQ(fit.n_samples, 99u);
  }
}

TEST(FitSurfaceTest, ConstantSamples) {
  std::vector<Sample> s;
  for (int i = 0; i < 20; ++i) s.push_back({double(i % 5), double(i / 5) * 10.0, 5.0});
  const auto fit = fit_surface(s, TermSet::poly31());
  EXPECT_NEAR(fit.coefficients(0), 5.0, 1e-10);
  for (Eigen::Index k = 1; k < fit.coefficients.size(); ++k) EXPECT_NEAR(fit.coefficients(k), 0.0, 1e-10);
  EXPECT_EQ(fit.r_squared, 1.0);
}

TEST(FitSurfaceTest, AgreesWithSvdSolution) {
  std::mt19937 rng(20240101);
  std::normal_distribution<double> noise(0.0, 0.8);
  const auto terms = TermSet::poly23();
  auto samples = grid_samples(terms, typical_coefficients(terms));
  for (auto& s : samples) s.value += noise(rng);
  const auto fit = fit_surface(samples, terms);
  const Eigen::VectorXd svd = design_of(samples, terms)
                                  .jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                                  .solve(values_of(samples));
  for (Eigen::Index k = 0; k < svd.size(); ++k) EXPECT_NEAR(fit.coefficients(k), svd(k), 1e-9 * (1 + std::abs(svd(k))));
}

TEST(FitSurfaceTest, ResidualOrthogonalToColumns) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> loss(0, 10), delay(0, 400), value(-5, 40);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Sample> samples;
    for (int i = 0; i < 60; ++i) samples.push_back({loss(rng), delay(rng), value(rng)});
    for (const auto& terms : {TermSet::poly23(), TermSet::poly33(), TermSet::poly31()}) {
      const auto fit = fit_surface(samples, terms);
      const auto x = design_of(samples, terms);
      const Eigen::VectorXd residual = values_of(samples) - x * fit.coefficients;
      for (Eigen::Index k = 0; k < x.cols(); ++k) {
        EXPECT_LE(std::abs(x.col(k).dot(residual)) / x.col(k).norm(), 1e-6) << terms.name() << " column " << k;
      }
      EXPECT_NEAR(fit.ss_res, residual.squaredNorm(), 1e-8 * (1 + fit.ss_res));
    }
  }
}

TEST(FitSurfaceTest, NestedTermSetNeverFitsWorse) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> loss(0, 10), delay(0, 400), value(0, 50);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Sample> samples;
    for (int i = 0; i < 40; ++i) samples.push_back({loss(rng), delay(rng), value(rng)});
    const auto small = fit_surface(samples, TermSet::poly23());
    const auto big = fit_surface(samples, TermSet::poly33());
    EXPECT_LE(big.ss_res, small.ss_res * (1 + 1e-10) + 1e-12);
  }
}

TEST(FitSurfaceTest, PermutationInvariant) {
  std::mt19937 rng(3);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto samples = bias_samples(SubjectiveSurface::g729_thai(), CodecProfile::g729(), GridSpec::standard());
  for (auto& s : samples) s.value += noise(rng);
  const auto base = fit_surface(samples, TermSet::poly23());
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(samples.begin(), samples.end(), rng);
    const auto again = fit_surface(samples, TermSet::poly23());
    EXPECT_LE((again.coefficients - base.coefficients).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(FitSurfaceTest, RmseDenominators) {
  auto samples = bias_samples(SubjectiveSurface::g729_thai(), CodecProfile::g729(), GridSpec::standard());
  const auto a = fit_surface(samples, TermSet::poly23(), RmseDenominator::n_minus_p);
  const auto b = fit_surface(samples, TermSet::poly23(), RmseDenominator::n);
  EXPECT_NEAR(a.rmse, std::sqrt(a.ss_res / 90.0), 1e-12);
  EXPECT_NEAR(b.rmse, std::sqrt(b.ss_res / 99.0), 1e-12);
}

TEST(FitSurfaceTest, TooFewSamples) {
  EXPECT_THROW(fit_surface({{1, 1, 1}}, TermSet::poly23()), FitError);
}

TEST(FitSurfaceTest, RankDeficiencyNamesTerms) {
  std::vector<Sample> s;
  for (int p = 0; p <= 10; ++p) s.push_back({double(p), 200.0, double(p)});
  for (int p = 0; p <= 10; ++p) s.push_back({double(p) + 0.5, 200.0, double(p)});
  try {
    fit_surface(s, TermSet::poly31());
    FAIL() << "expected FitError";
  } catch (const FitError& e) {
    EXPECT_NE(std::string(e.what()).find("rank deficient"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("y"), std::string::npos);
  }
}

TEST(DeriveBiasTest, ReproducesSelectedCandidate) {
  const auto fit = derive_bias(SubjectiveSurface::g729_thai(), CodecProfile::g729());
  EXPECT_EQ(fit.n_samples, 99u);
  EXPECT_GE(fit.r_squared, 0.99);
  EXPECT_LE(fit.rmse, 1.0);
  // Published selected row: R^2 0.9964, RMSE 0.7843.
  EXPECT_NEAR(fit.r_squared, 0.9964, 0.00005);
  EXPECT_NEAR(fit.rmse, 0.7843, 0.00005);

  const auto published = BiasPolynomial::g729_thai();
  const auto grid = GridSpec::standard();
  double max_delta = 0.0;
  for (double d : grid.delay_ms) {
    for (double p : grid.loss_percent) max_delta = std::max(max_delta, std::abs(fit(p, d) - published(p, d)));
  }
  EXPECT_LE(max_delta, 2.5);

  const auto poly = to_bias_polynomial(fit);
  for (Eigen::Index k = 0; k < 9; ++k) {
    EXPECT_NEAR(poly.coefficients(k), published.coefficients(k), 0.005 * std::abs(published.coefficients(k)))
        << "a" << k + 1;
  }
}

TEST(DeriveBiasTest, LargeGapAtMaximumDelay) {
  const auto samples = bias_samples(SubjectiveSurface::g729_thai(), CodecProfile::g729(), GridSpec::standard());
  const auto it = std::find_if(samples.begin(), samples.end(), [](const Sample& s) { return s.x == 0 && s.y == 400; });
  ASSERT_NE(it, samples.end());
  // Oracle: subjective MOS 4.113 - 0.2849 * 0.4, through the cubic, minus 93.2 - 34.097 - 10.
  const double m = 4.113 - 0.2849 * 0.4;
  const double oracle = (3.026 * m * m * m - 25.314 * m * m + 87.060 * m - 57.336) - (93.2 - 34.097 - 10.0);
  EXPECT_NEAR(it->value, oracle, 1e-9);
  EXPECT_NEAR(it->value, 30.412, 0.001);
  const auto fit = derive_bias(SubjectiveSurface::g729_thai(), CodecProfile::g729());
  EXPECT_NEAR(fit(0, 400), 31.1, 0.1);
}

TEST(DeriveBiasTest, DegenerateGrids) {
  const auto surface = SubjectiveSurface::g729_thai();
  const auto profile = CodecProfile::g729();
  EXPECT_THROW(derive_bias(surface, profile, GridSpec{{0}, {0}}), FitError);
  EXPECT_THROW(derive_bias(surface, profile, GridSpec{{0, 1, 2, 3, 4, 5}, {100}}), FitError);
  EXPECT_THROW(derive_bias(surface, profile, GridSpec{{0, 11}, {0, 50}}), DomainError);
  EXPECT_THROW(derive_bias(surface, profile, GridSpec{{2, 1}, {0, 50}}), DomainError);
  EXPECT_THROW(derive_bias(surface, profile, GridSpec{{}, {0}}), DomainError);
}

TEST(DeriveBiasTest, NonPoly23DoesNotConvert) {
  const auto fit = derive_bias(SubjectiveSurface::g729_thai(), CodecProfile::g729(), GridSpec::standard(),
                               TermSet::poly33());
  EXPECT_THROW(to_bias_polynomial(fit), ConfigError);
}

TEST(SelectTermSetTest, BiasGridOrdering) {
  const auto samples = bias_samples(SubjectiveSurface::g729_thai(), CodecProfile::g729(), GridSpec::standard());
  const auto ranked = select_termset(samples, {TermSet::poly32(), TermSet::poly23(), TermSet::poly33()});
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].termset.name(), "poly23");
  EXPECT_EQ(ranked[1].termset.name(), "poly33");
  EXPECT_EQ(ranked[2].termset.name(), "poly32");
  EXPECT_NEAR(ranked[1].rmse, 0.7879, 0.00005);
  EXPECT_NEAR(ranked[2].rmse, 0.8872, 0.00005);
  EXPECT_NEAR(ranked[2].r_squared, 0.9953, 0.00005);
}

TEST(SelectTermSetTest, ExactSurfaceWins) {
  const auto terms = TermSet::poly23();
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> loss(0, 10), delay(0, 400);
  std::vector<Sample> samples;
  const auto truth = typical_coefficients(terms);
  for (int i = 0; i < 80; ++i) {
    const double x = loss(rng), y = delay(rng);
    samples.push_back({x, y, evaluate_surface(terms, truth, x, y)});
  }
  const auto ranked = select_termset(samples, {TermSet::poly32(), TermSet::poly23()});
  EXPECT_EQ(ranked.front().termset.name(), "poly23");
}

TEST(SelectTermSetTest, TiesPreferFewerTerms) {
  const auto samples = grid_samples(TermSet::poly23(), Eigen::VectorXd::Zero(9));
  const auto ranked = select_termset(samples, {TermSet::poly33(), TermSet::poly31()});
  ASSERT_EQ(ranked.size(), 2u);
  EXPECT_EQ(ranked[0].rmse, ranked[1].rmse);
  EXPECT_EQ(ranked.front().termset.name(), "poly31");
}

TEST(SelectTermSetTest, SingleCandidate) {
  const auto samples = bias_samples(SubjectiveSurface::g729_thai(), CodecProfile::g729(), GridSpec::standard());
  const auto ranked = select_termset(samples, {TermSet::poly32()});
  ASSERT_EQ(ranked.size(), 1u);
  EXPECT_EQ(ranked.front().termset.name(), "poly32");
}

}  // namespace
}  // namespace voipqoe
