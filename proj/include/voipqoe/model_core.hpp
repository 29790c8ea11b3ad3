#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "voipqoe/errors.hpp"
#include "voipqoe/surface.hpp"

namespace voipqoe {

/// Upper edge of the loss/delay region the models were calibrated on.
inline constexpr double kMaxDomainLossPercent = 10.0;
inline constexpr double kMaxDomainDelayMs = 400.0;

/// A measured (packet loss, one-way delay) point. Loss is in percent
/// (3.0 == 3 %), delay in milliseconds.
class NetworkCondition {
 public:
  /// Throws DomainError on negative or non-finite input.
  NetworkCondition(double loss_percent, double delay_ms);

  double loss_percent() const { return loss_percent_; }
  double delay_ms() const { return delay_ms_; }

  bool in_domain() const;

  /// Description of the first violated domain bound, empty when in domain.
  std::string domain_violation() const;

 private:
  double loss_percent_;
  double delay_ms_;
};

/// Nine-term bias correction on the R scale. Terms in order
/// 1, x, y, x^2, xy, y^2, x^2y, xy^2, y^3 with x = loss (%), y = delay (ms).
struct BiasPolynomial {
  Eigen::Matrix<double, 9, 1> coefficients = Eigen::Matrix<double, 9, 1>::Zero();

  double operator()(double loss_percent, double delay_ms) const;

  static BiasPolynomial g729_thai();
};

/// Seven-term subjective MOS surface. Terms 1, x, y, x^2, xy, x^3, x^2y with
/// x = loss as a fraction (0.03 == 3 %) and y = delay in seconds.
struct SubjectiveSurface {
  Eigen::Matrix<double, 7, 1> coefficients = Eigen::Matrix<double, 7, 1>::Zero();

  double operator()(double loss_fraction, double delay_s) const;

  static SubjectiveSurface g729_thai();
};

struct CodecProfile {
  std::string name = "g729";
  double ro = 93.2;
  double advantage = 0.0;
  // Ipl = loss_a + loss_b * ln(1 + loss_c / loss_scale * P)
  double loss_a = 10.0;
  double loss_b = 25.21;
  double loss_c = 20.20;
  double loss_scale = 100.0;
  std::optional<BiasPolynomial> bias;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  /// Built-in G.729 profile with the Thai-user bias surface attached.
  static CodecProfile g729();
};

enum class ModelKind { simplified, enhanced, subjective };

std::string_view to_string(ModelKind kind);
/// Throws ConfigError for unknown names.
ModelKind model_kind_from_string(std::string_view name);

struct QualityEstimate {
  double r_value = 0.0;
  double mos = 1.0;
  double id = 0.0;
  double ipl = 0.0;
  double bias = 0.0;
  ModelKind model = ModelKind::simplified;
  bool extrapolated = false;
};

/// Whether out-of-domain conditions are rejected or computed and flagged.
enum class Extrapolation { forbid, allow };

double delay_impairment(double delay_ms);
double packetloss_impairment(double loss_percent, const CodecProfile& profile);

/// R to MOS with clamping to [1, 4.5] outside [0, 100].
double r_to_mos(double r);
/// Cubic approximate inverse of r_to_mos. Throws DomainError outside [1, 4.5].
double mos_to_r(double mos);

QualityEstimate simplified_estimate(const NetworkCondition& cond, const CodecProfile& profile,
                                    Extrapolation policy = Extrapolation::forbid);

double subjective_mos(const NetworkCondition& cond, const SubjectiveSurface& surface,
                      Extrapolation policy = Extrapolation::forbid);

/// Subjective surface expressed on the R scale via mos_to_r.
QualityEstimate subjective_estimate(const NetworkCondition& cond, const SubjectiveSurface& surface,
                                    Extrapolation policy = Extrapolation::forbid);

double bias_value(const NetworkCondition& cond, const BiasPolynomial& bias);

/// Throws ConfigError if the profile carries no bias polynomial.
QualityEstimate enhanced_estimate(const NetworkCondition& cond, const CodecProfile& profile,
                                  Extrapolation policy = Extrapolation::forbid);

/// Dispatches to the estimator named by `kind`.
QualityEstimate estimate(ModelKind kind, const NetworkCondition& cond, const CodecProfile& profile,
                         const SubjectiveSurface& surface, Extrapolation policy = Extrapolation::forbid);

}  // namespace voipqoe
