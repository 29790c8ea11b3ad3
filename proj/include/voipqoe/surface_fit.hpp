#pragma once

#include <vector>

#include <Eigen/Core>

#include "voipqoe/model_core.hpp"
#include "voipqoe/surface.hpp"

namespace voipqoe {

struct Sample {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

enum class RmseDenominator { n_minus_p, n };

struct FitResult {
  TermSet termset;
  Eigen::VectorXd coefficients;
  double r_squared = 0.0;
  double rmse = 0.0;
  double ss_res = 0.0;
  std::size_t n_samples = 0;

  double operator()(double x, double y) const { return evaluate_surface(termset, coefficients, x, y); }
};

/// Loss/delay grid in model units (percent, milliseconds).
struct GridSpec {
  std::vector<double> loss_percent;
  std::vector<double> delay_ms;

  /// Non-empty, strictly increasing, inside the model domain. Throws DomainError.
  void validate() const;
  std::size_t size() const { return loss_percent.size() * delay_ms.size(); }

  /// Loss 0..10 step 1, delay 0..400 step 50 (99 points).
  static GridSpec standard();
};

/// Ordinary least squares over `termset`.
///
/// Solves the normal equations of the column-scaled design matrix with a
/// Cholesky factorization; every column is scaled to unit max-abs first so
/// that y^3 with y up to 400 does not swamp the intercept. Throws FitError when
/// there are fewer samples than terms or the design has dependent columns.
FitResult fit_surface(const std::vector<Sample>& samples, const TermSet& termset,
                      RmseDenominator denominator = RmseDenominator::n_minus_p);

/// Bias targets mos_to_r(subjective) - simplified R over the grid.
std::vector<Sample> bias_samples(const SubjectiveSurface& surface, const CodecProfile& profile,
                                 const GridSpec& grid);

/// Bias targets at an explicit list of conditions (e.g. the nine scenarios).
std::vector<Sample> bias_samples(const SubjectiveSurface& surface, const CodecProfile& profile,
                                 const std::vector<NetworkCondition>& conditions);

FitResult derive_bias(const SubjectiveSurface& surface, const CodecProfile& profile,
                      const GridSpec& grid = GridSpec::standard(), const TermSet& termset = TermSet::poly23(),
                      RmseDenominator denominator = RmseDenominator::n_minus_p);

/// Requires a POLY23 fit. Throws ConfigError otherwise.
BiasPolynomial to_bias_polynomial(const FitResult& fit);

/// Fits every candidate; ascending rmse, then fewer terms, then higher r_squared.
std::vector<FitResult> select_termset(const std::vector<Sample>& samples, const std::vector<TermSet>& candidates,
                                      RmseDenominator denominator = RmseDenominator::n_minus_p);

}  // namespace voipqoe
