#include "voipqoe/model_core.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "voipqoe/embedded_data.hpp"

namespace voipqoe {
namespace {

const CodecProfile kG729 = CodecProfile::g729();
const SubjectiveSurface kSurface = SubjectiveSurface::g729_thai();

TEST(NetworkConditionTest, RejectsNegativeAndNonFinite) {
  EXPECT_THROW(NetworkCondition(-0.1, 0), DomainError);
  EXPECT_THROW(NetworkCondition(0, -1), DomainError);
  EXPECT_THROW(NetworkCondition(NAN, 0), DomainError);
  EXPECT_THROW(NetworkCondition(0, INFINITY), DomainError);
}

TEST(NetworkConditionTest, ClosedDomain) {
  EXPECT_TRUE(NetworkCondition(0, 0).in_domain());
  EXPECT_TRUE(NetworkCondition(10, 400).in_domain());
  EXPECT_FALSE(NetworkCondition(10.01, 0).in_domain());
  EXPECT_FALSE(NetworkCondition(0, 400.5).in_domain());
  EXPECT_NE(NetworkCondition(12, 0).domain_violation().find("loss_percent"), std::string::npos);
  EXPECT_NE(NetworkCondition(1, 500).domain_violation().find("delay_ms"), std::string::npos);
  EXPECT_TRUE(NetworkCondition(1, 1).domain_violation().empty());
}

TEST(DelayImpairmentTest, Examples) {
  EXPECT_DOUBLE_EQ(delay_impairment(0), 0.0);
  // 0.024 * 200 + 0.11 * 22.7
  EXPECT_NEAR(delay_impairment(200), 4.8 + 2.497, 1e-12);
  EXPECT_NEAR(delay_impairment(400), 9.6 + 0.11 * 222.7, 1e-12);
  EXPECT_NEAR(delay_impairment(400), 34.097, 1e-9);
  EXPECT_THROW(delay_impairment(-1), DomainError);
}

TEST(DelayImpairmentTest, KneeIsContinuous) {
  EXPECT_NEAR(delay_impairment(177.3), 0.024 * 177.3, 1e-12);
  EXPECT_NEAR(delay_impairment(177.3 - 1e-9), delay_impairment(177.3), 1e-8);
  // Slope changes from 0.024 to 0.134 at the knee.
  EXPECT_NEAR(delay_impairment(187.3) - delay_impairment(177.3), 1.34, 1e-9);
}

TEST(PacketlossImpairmentTest, Examples) {
  EXPECT_EQ(packetloss_impairment(0, kG729), kG729.loss_a);
  // Inversions of the published simplified R values at zero delay.
  EXPECT_NEAR(packetloss_impairment(2, kG729), 93.2 - 74.646, 0.001);
  EXPECT_NEAR(packetloss_impairment(2, kG729), 10 + 25.21 * std::log(1.404), 1e-12);
  EXPECT_NEAR(packetloss_impairment(10, kG729), 93.2 - 55.336, 0.002);
  EXPECT_THROW(packetloss_impairment(-0.5, kG729), DomainError);
}

TEST(PacketlossImpairmentTest, ScaleDivisorIsConfigurable) {
  CodecProfile literal = kG729;
  literal.loss_scale = 1000.0;  // the "0.001 c P" reading
  EXPECT_NEAR(packetloss_impairment(2, literal), 10 + 25.21 * std::log(1 + 0.0404), 1e-12);
}

TEST(RToMosTest, PublishedPoints) {
  EXPECT_NEAR(r_to_mos(83.200), 4.139, 0.001);
  EXPECT_NEAR(r_to_mos(21.238), 1.290, 0.001);
  EXPECT_EQ(r_to_mos(110), 4.5);
  EXPECT_EQ(r_to_mos(-5), 1.0);
  EXPECT_EQ(r_to_mos(100.0000001), 4.5);
  EXPECT_DOUBLE_EQ(r_to_mos(0), 1.0);
}

TEST(RToMosTest, BoundedAndMonotone) {
  for (double r = -50; r <= 150; r += 0.25) {
    const double m = r_to_mos(r);
    EXPECT_GE(m, 1.0);
    EXPECT_LE(m, 4.5);
  }
  double prev = r_to_mos(0);
  for (int k = 1; k <= 1000; ++k) {
    const double m = r_to_mos(k * 0.1);
    EXPECT_GE(m, prev) << "at R=" << k * 0.1;
    prev = m;
  }
}

TEST(MosToRTest, Examples) {
  const auto cubic = [](double m) { return 3.026 * m * m * m - 25.314 * m * m + 87.060 * m - 57.336; };
  EXPECT_NEAR(mos_to_r(4.113), 83.06, 0.05);
  EXPECT_NEAR(mos_to_r(4.113), cubic(4.113), 1e-10);
  EXPECT_NEAR(mos_to_r(1.0), 7.436, 1e-9);
  EXPECT_NEAR(r_to_mos(50), 2.575, 1e-12);
  EXPECT_NEAR(mos_to_r(r_to_mos(50)), 50.66, 0.05);
  EXPECT_THROW(mos_to_r(0.99), DomainError);
  EXPECT_THROW(mos_to_r(4.51), DomainError);
}

TEST(RToMosTest, FloorHoldsBelowTheCubicDip) {
  // Raw cubic at R = 3: 1 + 0.105 - 3 * 57 * 97 * 7e-6 = 0.988893
  EXPECT_EQ(r_to_mos(3), 1.0);
  EXPECT_GT(r_to_mos(6.6), 1.0);
}

TEST(MosToRTest, ApproximateInverseOnGrid) {
  // Round-trip error of the cubic inverse, frozen from direct evaluation of
  // both polynomials on the integer grid: worst case 2.270 at R = 17, and
  // within 1.5 from R = 24 upwards.
  double worst = 0.0;
  int worst_at = 0;
  for (int r = 10; r <= 95; ++r) {
    const double e = std::abs(mos_to_r(r_to_mos(r)) - r);
    if (e > worst) {
      worst = e;
      worst_at = r;
    }
    if (r >= 24) EXPECT_LE(e, 1.5) << "R=" << r;
  }
  EXPECT_EQ(worst_at, 17);
  EXPECT_NEAR(worst, 2.27002, 1e-4);
}

TEST(SimplifiedEstimateTest, PublishedRows) {
  struct Case {
    double loss, delay, r, mos;
  };
  for (const auto& c : {Case{0, 0, 83.200, 4.139}, Case{3, 400, 37.160, 1.927}, Case{10, 400, 21.238, 1.290}}) {
    const auto q = simplified_estimate(NetworkCondition(c.loss, c.delay), kG729);
    EXPECT_NEAR(q.r_value, c.r, 0.01);
    EXPECT_NEAR(q.mos, c.mos, 0.001);
    EXPECT_EQ(q.model, ModelKind::simplified);
    EXPECT_FALSE(q.extrapolated);
  }
}

TEST(SimplifiedEstimateTest, DomainPolicy) {
  const NetworkCondition far(12, 0);
  try {
    simplified_estimate(far, kG729);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("loss_percent"), std::string::npos);
  }
  const auto q = simplified_estimate(far, kG729, Extrapolation::allow);
  EXPECT_TRUE(q.extrapolated);
  EXPECT_NEAR(q.r_value, 52.0, 1.0);
}

TEST(SimplifiedEstimateTest, AdvantageAndRo) {
  CodecProfile legacy = kG729;
  legacy.ro = 94.2;
  legacy.advantage = 5;
  const NetworkCondition c(1, 100);
  EXPECT_NEAR(simplified_estimate(c, legacy).r_value, simplified_estimate(c, kG729).r_value + 6.0, 1e-12);
}

TEST(SubjectiveMosTest, Examples) {
  EXPECT_DOUBLE_EQ(subjective_mos(NetworkCondition(0, 0), kSurface), 4.113);
  // Direct evaluation at x = 0.10, y = 0.4.
  const double x = 0.10, y = 0.4;
  const double oracle = 4.113 - 13.960 * x - 0.2849 * y + 92.16 * x * x + 18.030 * x * y - 225.9 * x * x * x -
                        165.7 * x * x * y;
  EXPECT_NEAR(subjective_mos(NetworkCondition(10, 400), kSurface), oracle, 1e-12);
  EXPECT_NEAR(subjective_mos(NetworkCondition(10, 400), kSurface), 3.357, 0.001);
  EXPECT_NEAR(subjective_mos(NetworkCondition(2, 0), kSurface), 3.869, 0.001);
  EXPECT_THROW(subjective_mos(NetworkCondition(0, 401), kSurface), DomainError);
}

TEST(SubjectiveMosTest, StaysOnFivePointScaleOverDomain) {
  for (double p = 0; p <= 10; p += 0.5) {
    for (double d = 0; d <= 400; d += 50) {
      const double m = subjective_mos(NetworkCondition(p, d), kSurface);
      EXPECT_GE(m, 1.0);
      EXPECT_LE(m, 5.0);
    }
  }
}

TEST(BiasValueTest, Examples) {
  const auto bias = BiasPolynomial::g729_thai();
  EXPECT_DOUBLE_EQ(bias_value(NetworkCondition(0, 0), bias), 0.4327);
  EXPECT_NEAR(bias_value(NetworkCondition(2, 0), bias), 0.4327 + 2 * 0.6654 + 4 * 0.03563, 1e-12);
  EXPECT_NEAR(bias_value(NetworkCondition(2, 0), bias), 76.552 - 74.646, 0.01);
  EXPECT_NEAR(bias_value(NetworkCondition(10, 400), bias), 64.417 - 21.238, 0.05);
}

TEST(EnhancedEstimateTest, PublishedRows) {
  struct Case {
    double loss, delay, r, mos, r_tol, mos_tol;
  };
  for (const auto& c : {Case{0, 0, 83.633, 4.149, 0.01, 0.005}, Case{0, 400, 80.191, 4.033, 0.05, 0.005},
                        Case{5, 400, 71.950, 3.685, 0.05, 0.005}}) {
    const auto q = enhanced_estimate(NetworkCondition(c.loss, c.delay), kG729);
    EXPECT_NEAR(q.r_value, c.r, c.r_tol);
    EXPECT_NEAR(q.mos, c.mos, c.mos_tol);
    EXPECT_EQ(q.model, ModelKind::enhanced);
  }
}

TEST(EnhancedEstimateTest, NeedsBias) {
  CodecProfile bare = kG729;
  bare.bias.reset();
  EXPECT_THROW(enhanced_estimate(NetworkCondition(0, 0), bare), ConfigError);
}

TEST(ModelPropertiesTest, LossMonotonicity) {
  for (double d = 0; d <= 400; d += 50) {
    double prev_s = INFINITY, prev_e = INFINITY, prev_subj = INFINITY;
    for (double p = 0; p <= 10; p += 0.5) {
      const NetworkCondition c(p, d);
      const double s = simplified_estimate(c, kG729).r_value;
      const double e = enhanced_estimate(c, kG729).r_value;
      const double subj = subjective_mos(c, kSurface);
      EXPECT_LT(s, prev_s) << p << "," << d;
      EXPECT_LT(e, prev_e) << p << "," << d;
      EXPECT_LT(subj, prev_subj) << p << "," << d;
      prev_s = s;
      prev_e = e;
      prev_subj = subj;
    }
  }
}

TEST(ModelPropertiesTest, AdditivityAndBreakdown) {
  const auto& bias = *kG729.bias;
  for (double p = 0; p <= 10; p += 0.25) {
    for (double d = 0; d <= 400; d += 12.5) {
      const NetworkCondition c(p, d);
      const auto s = simplified_estimate(c, kG729);
      const auto e = enhanced_estimate(c, kG729);
      EXPECT_EQ(e.r_value, s.r_value + bias_value(c, bias));
      EXPECT_EQ(e.bias, bias_value(c, bias));
      EXPECT_NEAR(s.r_value, kG729.ro - s.id - s.ipl, 1e-9);
      EXPECT_NEAR(e.r_value, kG729.ro - e.id - e.ipl + e.bias, 1e-9);
      EXPECT_EQ(s.mos, r_to_mos(s.r_value));
      EXPECT_EQ(e.mos, r_to_mos(e.r_value));
    }
  }
}

TEST(ModelPropertiesTest, PublishedTableAgreesWithinStatedTolerances) {
  for (const auto& row : embedded::table6_golden()) {
    const NetworkCondition c(row.loss_percent, row.delay_ms);
    const auto s = simplified_estimate(c, kG729);
    const auto e = enhanced_estimate(c, kG729);
    EXPECT_NEAR(s.r_value, row.simplified_r, 0.01) << row.scenario_id;
    EXPECT_NEAR(s.mos, row.simplified_mos, 0.001) << row.scenario_id;
    EXPECT_NEAR(e.r_value, row.enhanced_r, 0.05) << row.scenario_id;
    EXPECT_NEAR(e.mos, row.enhanced_mos, 0.005) << row.scenario_id;
  }
}

TEST(CodecProfileTest, Validation) {
  EXPECT_NO_THROW(kG729.validate());
  CodecProfile p = kG729;
  p.loss_b = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = kG729;
  p.loss_c = -1;
  EXPECT_THROW(p.validate(), ConfigError);
  p = kG729;
  p.ro = 100.5;
  EXPECT_THROW(p.validate(), ConfigError);
  p.ro = 100;
  EXPECT_NO_THROW(p.validate());
}

TEST(ModelKindTest, Names) {
  for (auto k : {ModelKind::simplified, ModelKind::enhanced, ModelKind::subjective}) {
    EXPECT_EQ(model_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(model_kind_from_string("pesq"), ConfigError);
}

}  // namespace
}  // namespace voipqoe
