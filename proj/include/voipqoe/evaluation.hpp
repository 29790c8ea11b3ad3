#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voipqoe/model_core.hpp"

namespace voipqoe {

/// One participant's vote under one scenario.
struct SubjectiveRecord {
  std::string scenario_id;
  double loss_percent = 0.0;
  double delay_ms = 0.0;
  double score = 0.0;
  std::string test_set;
  std::optional<std::string> participant_id;

  friend bool operator==(const SubjectiveRecord&, const SubjectiveRecord&) = default;
};

/// Published per-scenario summary: mean +- sample SD over n votes.
struct ScenarioAggregate {
  std::string scenario_id;
  double loss_percent = 0.0;
  double delay_ms = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  int n = 0;
};

/// A test set carries raw records, scenario aggregates, or both.
struct TestSet {
  std::string id;
  std::vector<SubjectiveRecord> records;
  std::vector<ScenarioAggregate> aggregates;

  /// Aggregates if present, otherwise computed from the records by scenario.
  std::vector<ScenarioAggregate> scenario_aggregates() const;
};

enum class EvaluationMode { per_record, scenario_mean };

std::string_view to_string(EvaluationMode mode);

/// Forecast-accuracy band of a MAPE value.
std::string_view mape_band(double mape_percent);

/// (100/n) * sum |pred - obs| / |obs|. Throws DataError on length mismatch,
/// empty input, or a zero observation.
double mape(std::span<const double> predicted, std::span<const double> observed);

/// Weighted variant used for scenario means: sum w|p-o|/|o| / sum w * 100.
double weighted_mape(std::span<const double> predicted, std::span<const double> observed,
                     std::span<const double> weights);

/// (baseline - enhanced) / baseline * 100. Throws DataError if baseline <= 0.
double error_reduction(double baseline_mape, double enhanced_mape);

using ScoreMultiset = std::vector<int>;

/// All sorted multisets of n integer votes in [1, 5] whose mean and sample SD
/// (n - 1 denominator) both match to within `tolerance`. Requires n <= 10.
std::vector<ScoreMultiset> reconstruct_score_multisets(double mean, double sd, int n, double tolerance = 0.005);

/// Multisets minimizing max(|mean - m|, |sd - s|); used for cells that have no
/// exact reconstruction.
std::vector<ScoreMultiset> nearest_score_multisets(double mean, double sd, int n);

/// Exact reconstructions if any exist, else the nearest ones. `exact` reports which.
std::vector<ScoreMultiset> plausible_score_multisets(double mean, double sd, int n, bool* exact = nullptr);

struct MapeInterval {
  double low = 0.0;
  double high = 0.0;
  std::vector<std::string> irreproducible_cells;

  bool contains(double value, double slack = 0.0) const { return value >= low - slack && value <= high + slack; }
};

struct ModelMape {
  ModelKind model = ModelKind::simplified;
  double mape = 0.0;
  std::string band;
  std::optional<MapeInterval> per_record_bounds;
};

struct TestSetResult {
  std::string test_set;
  std::size_t record_count = 0;
  std::vector<ModelMape> models;
};

struct EvaluationReport {
  EvaluationMode mode = EvaluationMode::scenario_mean;
  std::vector<TestSetResult> test_sets;
  std::map<ModelKind, double> average_mape;
  std::optional<double> error_reduction_percent;
  std::optional<ModelKind> baseline;
  std::optional<ModelKind> improved;

  const ModelMape& cell(const std::string& test_set, ModelKind model) const;
};

struct EvaluationOptions {
  EvaluationMode mode = EvaluationMode::scenario_mean;
  /// Also bound the per-record MAPE by enumerating vote multisets consistent
  /// with each scenario's mean and SD.
  bool per_record_bounds = false;
};

/// Scores every test set under every model. Test sets are reported in id order.
/// The error reduction compares simplified (baseline) to enhanced when both are
/// requested. Throws DomainError for an out-of-domain scenario.
EvaluationReport evaluate_models(const std::vector<TestSet>& testsets, const std::vector<ModelKind>& models,
                                 const CodecProfile& profile, const SubjectiveSurface& surface,
                                 const EvaluationOptions& options = {});

/// Bounds of the per-record MAPE for one test set given only its aggregates.
MapeInterval per_record_mape_bounds(const std::vector<ScenarioAggregate>& aggregates, ModelKind model,
                                    const CodecProfile& profile, const SubjectiveSurface& surface);

}  // namespace voipqoe
