#include "voipqoe/surface_fit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace voipqoe {

TermSet::TermSet(std::string name, std::vector<Monomial> terms) : name_(std::move(name)), terms_(std::move(terms)) {
  std::set<std::pair<int, int>> seen;
  for (const auto& t : terms_) {
    if (t.x_power < 0 || t.y_power < 0) throw std::invalid_argument("negative exponent in term set " + name_);
    if (!seen.emplace(t.x_power, t.y_power).second) {
      throw std::invalid_argument("duplicate term " + std::to_string(t.x_power) + "," + std::to_string(t.y_power) +
                                  " in term set " + name_);
    }
  }
}

bool TermSet::has_intercept() const {
  return std::find(terms_.begin(), terms_.end(), Monomial{0, 0}) != terms_.end();
}

std::string TermSet::term_label(std::size_t k) const {
  const auto& t = terms_.at(k);
  if (t.x_power == 0 && t.y_power == 0) return "1";
  std::string s;
  auto factor = [&s](const char* var, int power) {
    if (power == 0) return;
    if (!s.empty()) s += "*";
    s += var;
    if (power > 1) s += "^" + std::to_string(power);
  };
  factor("x", t.x_power);
  factor("y", t.y_power);
  return s;
}

TermSet TermSet::poly31() {
  return {"poly31", {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {3, 0}, {2, 1}}};
}

TermSet TermSet::poly23() {
  return {"poly23", {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {2, 1}, {1, 2}, {0, 3}}};
}

TermSet TermSet::poly32() {
  return {"poly32", {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}}};
}

TermSet TermSet::poly33() {
  return {"poly33", {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}}};
}

TermSet TermSet::from_name(const std::string& name) {
  if (name == "poly31") return poly31();
  if (name == "poly23") return poly23();
  if (name == "poly32") return poly32();
  if (name == "poly33") return poly33();
  throw ConfigError("unknown term set '" + name + "' (expected poly31, poly23, poly32 or poly33)");
}

void GridSpec::validate() const {
  auto check = [](const std::vector<double>& axis, const char* label, double upper) {
    if (axis.empty()) throw DomainError(std::string(label) + " grid is empty");
    for (std::size_t i = 0; i < axis.size(); ++i) {
      if (!std::isfinite(axis[i]) || axis[i] < 0.0 || axis[i] > upper) {
        std::ostringstream os;
        os << label << " grid value " << axis[i] << " outside [0, " << upper << "]";
        throw DomainError(os.str());
      }
      if (i > 0 && !(axis[i] > axis[i - 1])) {
        throw DomainError(std::string(label) + " grid must be strictly increasing");
      }
    }
  };
  check(loss_percent, "loss", kMaxDomainLossPercent);
  check(delay_ms, "delay", kMaxDomainDelayMs);
}

GridSpec GridSpec::standard() {
  GridSpec g;
  for (int p = 0; p <= 10; ++p) g.loss_percent.push_back(p);
  for (int d = 0; d <= 400; d += 50) g.delay_ms.push_back(d);
  return g;
}

FitResult fit_surface(const std::vector<Sample>& samples, const TermSet& termset, RmseDenominator denominator) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  const auto p = static_cast<Eigen::Index>(termset.size());
  if (p == 0) throw FitError("term set '" + termset.name() + "' is empty");
  if (n < p) {
    throw FitError("need at least " + std::to_string(p) + " samples to fit " + termset.name() + ", got " +
                   std::to_string(n));
  }

  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.value)) {
      throw FitError("sample " + std::to_string(i) + " is not finite");
    }
    for (Eigen::Index k = 0; k < p; ++k) {
      design(i, k) = monomial_value(termset.terms()[static_cast<std::size_t>(k)], s.x, s.y);
    }
    target(i) = s.value;
  }

  Eigen::VectorXd scale = design.cwiseAbs().colwise().maxCoeff().transpose();
  for (Eigen::Index k = 0; k < p; ++k) {
    if (scale(k) == 0.0) {
      throw FitError("term " + termset.term_label(static_cast<std::size_t>(k)) + " is identically zero on the samples");
    }
  }
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    std::string dependent;
    for (Eigen::Index k = qr.rank(); k < p; ++k) {
      if (!dependent.empty()) dependent += ", ";
      dependent += termset.term_label(static_cast<std::size_t>(qr.colsPermutation().indices()(k)));
    }
    throw FitError("design matrix for " + termset.name() + " is rank deficient (rank " + std::to_string(qr.rank()) +
                   " of " + std::to_string(p) + "); dependent terms: " + dependent);
  }

  const Eigen::MatrixXd gram = scaled.transpose() * scaled;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw FitError("normal equations for " + termset.name() + " are not positive definite");
  const Eigen::VectorXd scaled_coef = llt.solve(scaled.transpose() * target);

  FitResult fit;
  fit.termset = termset;
  fit.coefficients = scaled_coef.cwiseQuotient(scale);
  fit.n_samples = samples.size();

  const Eigen::VectorXd residual = target - scaled * scaled_coef;
  fit.ss_res = residual.squaredNorm();
  const double ss_tot = (target.array() - target.mean()).square().sum();
  if (ss_tot > 0.0) {
    fit.r_squared = 1.0 - fit.ss_res / ss_tot;
  } else {
    fit.r_squared = fit.ss_res <= 1e-20 ? 1.0 : 0.0;
  }
  const auto dof = denominator == RmseDenominator::n_minus_p ? n - p : n;
  fit.rmse = dof > 0 ? std::sqrt(fit.ss_res / static_cast<double>(dof)) : 0.0;
  return fit;
}

std::vector<Sample> bias_samples(const SubjectiveSurface& surface, const CodecProfile& profile,
                                 const std::vector<NetworkCondition>& conditions) {
  std::vector<Sample> out;
  out.reserve(conditions.size());
  for (const auto& cond : conditions) {
    const double subjective_r = mos_to_r(subjective_mos(cond, surface));
    const double simplified_r = simplified_estimate(cond, profile).r_value;
    out.push_back({cond.loss_percent(), cond.delay_ms(), subjective_r - simplified_r});
  }
  return out;
}

std::vector<Sample> bias_samples(const SubjectiveSurface& surface, const CodecProfile& profile,
                                 const GridSpec& grid) {
  grid.validate();
  std::vector<NetworkCondition> conditions;
  conditions.reserve(grid.size());
  for (double d : grid.delay_ms) {
    for (double p : grid.loss_percent) conditions.emplace_back(p, d);
  }
  return bias_samples(surface, profile, conditions);
}

FitResult derive_bias(const SubjectiveSurface& surface, const CodecProfile& profile, const GridSpec& grid,
                      const TermSet& termset, RmseDenominator denominator) {
  return fit_surface(bias_samples(surface, profile, grid), termset, denominator);
}

BiasPolynomial to_bias_polynomial(const FitResult& fit) {
  if (!(fit.termset == TermSet::poly23())) {
    throw ConfigError("only a poly23 fit converts to a bias polynomial, got " + fit.termset.name());
  }
  BiasPolynomial b;
  b.coefficients = fit.coefficients;
  return b;
}

std::vector<FitResult> select_termset(const std::vector<Sample>& samples, const std::vector<TermSet>& candidates,
                                      RmseDenominator denominator) {
  std::vector<FitResult> ranked;
  ranked.reserve(candidates.size());
  for (const auto& c : candidates) ranked.push_back(fit_surface(samples, c, denominator));
  std::stable_sort(ranked.begin(), ranked.end(), [](const FitResult& a, const FitResult& b) {
    if (a.rmse != b.rmse) return a.rmse < b.rmse;
    if (a.termset.size() != b.termset.size()) return a.termset.size() < b.termset.size();
    return a.r_squared > b.r_squared;
  });
  return ranked;
}

}  // namespace voipqoe
