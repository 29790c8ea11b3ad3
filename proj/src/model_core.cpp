#include "voipqoe/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace voipqoe {

namespace {

constexpr double kDelayKneeMs = 177.3;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void check_domain(const NetworkCondition& cond, Extrapolation policy) {
  if (policy == Extrapolation::allow || cond.in_domain()) return;
  throw DomainError(cond.domain_violation() + " (pass the extrapolation flag to compute anyway)");
}

const TermSet& bias_terms() {
  static const TermSet terms = TermSet::poly23();
  return terms;
}

const TermSet& subjective_terms() {
  static const TermSet terms = TermSet::poly31();
  return terms;
}

}  // namespace

NetworkCondition::NetworkCondition(double loss_percent, double delay_ms)
    : loss_percent_(loss_percent), delay_ms_(delay_ms) {
  if (!std::isfinite(loss_percent) || loss_percent < 0.0) {
    throw DomainError("loss_percent must be finite and >= 0, got " + fmt(loss_percent));
  }
  if (!std::isfinite(delay_ms) || delay_ms < 0.0) {
    throw DomainError("delay_ms must be finite and >= 0, got " + fmt(delay_ms));
  }
}

bool NetworkCondition::in_domain() const {
  return loss_percent_ <= kMaxDomainLossPercent && delay_ms_ <= kMaxDomainDelayMs;
}

std::string NetworkCondition::domain_violation() const {
  if (loss_percent_ > kMaxDomainLossPercent) {
    return "loss_percent " + fmt(loss_percent_) + " exceeds the model domain bound of " +
           fmt(kMaxDomainLossPercent) + " %";
  }
  if (delay_ms_ > kMaxDomainDelayMs) {
    return "delay_ms " + fmt(delay_ms_) + " exceeds the model domain bound of " + fmt(kMaxDomainDelayMs) +
           " ms";
  }
  return {};
}

double BiasPolynomial::operator()(double loss_percent, double delay_ms) const {
  return evaluate_surface(bias_terms(), coefficients, loss_percent, delay_ms);
}

BiasPolynomial BiasPolynomial::g729_thai() {
  BiasPolynomial b;
  b.coefficients << 0.4327, 0.6654, -0.03461, 0.03563, 0.004689, 0.000379, -0.0004205, -3.98e-8, -2.52e-7;
  return b;
}

double SubjectiveSurface::operator()(double loss_fraction, double delay_s) const {
  return evaluate_surface(subjective_terms(), coefficients, loss_fraction, delay_s);
}

SubjectiveSurface SubjectiveSurface::g729_thai() {
  SubjectiveSurface s;
  s.coefficients << 4.113, -13.960, -0.2849, 92.16, 18.030, -225.9, -165.7;
  return s;
}

void CodecProfile::validate() const {
  const auto where = "codec profile '" + name + "': ";
  if (name.empty()) throw ConfigError("codec profile name must not be empty");
  if (!std::isfinite(ro) || ro <= 0.0 || ro > 100.0) throw ConfigError(where + "ro must lie in (0, 100]");
  if (!std::isfinite(advantage)) throw ConfigError(where + "advantage must be finite");
  if (!std::isfinite(loss_a)) throw ConfigError(where + "loss_a must be finite");
  if (!std::isfinite(loss_b) || loss_b <= 0.0) throw ConfigError(where + "loss_b must be > 0");
  if (!std::isfinite(loss_c) || loss_c <= 0.0) throw ConfigError(where + "loss_c must be > 0");
  if (!std::isfinite(loss_scale) || loss_scale <= 0.0) throw ConfigError(where + "loss_scale must be > 0");
  if (bias && !bias->coefficients.allFinite()) throw ConfigError(where + "bias coefficients must be finite");
}

CodecProfile CodecProfile::g729() {
  CodecProfile p;
  p.bias = BiasPolynomial::g729_thai();
  return p;
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::simplified:
      return "simplified";
    case ModelKind::enhanced:
      return "enhanced";
    case ModelKind::subjective:
      return "subjective";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
  if (name == "simplified") return ModelKind::simplified;
  if (name == "enhanced") return ModelKind::enhanced;
  if (name == "subjective") return ModelKind::subjective;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected simplified, enhanced or subjective)");
}

double delay_impairment(double delay_ms) {
  if (!(delay_ms >= 0.0)) throw DomainError("delay_ms must be >= 0, got " + fmt(delay_ms));
  // H(0) = 1: the knee itself already takes the second branch.
  const double knee = delay_ms - kDelayKneeMs;
  return 0.024 * delay_ms + (knee >= 0.0 ? 0.11 * knee : 0.0);
}

double packetloss_impairment(double loss_percent, const CodecProfile& profile) {
  if (!(loss_percent >= 0.0)) throw DomainError("loss_percent must be >= 0, got " + fmt(loss_percent));
  return profile.loss_a + profile.loss_b * std::log1p(profile.loss_c / profile.loss_scale * loss_percent);
}

double r_to_mos(double r) {
  if (r > 100.0) return 4.5;
  if (r < 0.0) return 1.0;
  // The cubic dips to ~0.989 for 0 < R < 6.5; hold the scale floor there.
  return std::max(1.0, 1.0 + 0.035 * r + r * (r - 60.0) * (100.0 - r) * 7e-6);
}

double mos_to_r(double mos) {
  if (!(mos >= 1.0 && mos <= 4.5)) throw DomainError("MOS " + fmt(mos) + " outside [1, 4.5]");
  return ((3.026 * mos - 25.314) * mos + 87.060) * mos - 57.336;
}

QualityEstimate simplified_estimate(const NetworkCondition& cond, const CodecProfile& profile,
                                    Extrapolation policy) {
  check_domain(cond, policy);
  QualityEstimate q;
  q.id = delay_impairment(cond.delay_ms());
  q.ipl = packetloss_impairment(cond.loss_percent(), profile);
  q.r_value = profile.ro - q.id - q.ipl + profile.advantage;
  q.mos = r_to_mos(q.r_value);
  q.model = ModelKind::simplified;
  q.extrapolated = !cond.in_domain();
  return q;
}

double subjective_mos(const NetworkCondition& cond, const SubjectiveSurface& surface, Extrapolation policy) {
  check_domain(cond, policy);
  return surface(cond.loss_percent() / 100.0, cond.delay_ms() / 1000.0);
}

QualityEstimate subjective_estimate(const NetworkCondition& cond, const SubjectiveSurface& surface,
                                    Extrapolation policy) {
  QualityEstimate q;
  q.mos = subjective_mos(cond, surface, policy);
  q.r_value = mos_to_r(std::clamp(q.mos, 1.0, 4.5));
  q.model = ModelKind::subjective;
  q.extrapolated = !cond.in_domain();
  return q;
}

double bias_value(const NetworkCondition& cond, const BiasPolynomial& bias) {
  return bias(cond.loss_percent(), cond.delay_ms());
}

QualityEstimate enhanced_estimate(const NetworkCondition& cond, const CodecProfile& profile,
                                  Extrapolation policy) {
  if (!profile.bias) {
    throw ConfigError("codec profile '" + profile.name + "' has no bias polynomial; the enhanced model needs one");
  }
  QualityEstimate q = simplified_estimate(cond, profile, policy);
  q.bias = bias_value(cond, *profile.bias);
  q.r_value += q.bias;
  q.mos = r_to_mos(q.r_value);
  q.model = ModelKind::enhanced;
  return q;
}

QualityEstimate estimate(ModelKind kind, const NetworkCondition& cond, const CodecProfile& profile,
                         const SubjectiveSurface& surface, Extrapolation policy) {
  switch (kind) {
    case ModelKind::simplified:
      return simplified_estimate(cond, profile, policy);
    case ModelKind::enhanced:
      return enhanced_estimate(cond, profile, policy);
    case ModelKind::subjective:
      return subjective_estimate(cond, surface, policy);
  }
  throw ConfigError("unknown model kind");
}

}  // namespace voipqoe
