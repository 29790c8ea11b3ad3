#include "voipqoe/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace voipqoe {

namespace {

struct MultisetStats {
  double mean;
  double sd;
};

MultisetStats stats_of(const ScoreMultiset& votes) {
  const double n = static_cast<double>(votes.size());
  const double mean = std::accumulate(votes.begin(), votes.end(), 0.0) / n;
  double ss = 0.0;
  for (int v : votes) ss += (v - mean) * (v - mean);
  return {mean, votes.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

// Calls visit() for every non-decreasing sequence of n votes in [1, 5], in
// lexicographic order.
template <typename Visit>
void for_each_multiset(int n, Visit&& visit) {
  ScoreMultiset votes(static_cast<std::size_t>(n), 1);
  while (true) {
    visit(votes);
    int i = n - 1;
    while (i >= 0 && votes[static_cast<std::size_t>(i)] == 5) --i;
    if (i < 0) return;
    const int next = votes[static_cast<std::size_t>(i)] + 1;
    for (int k = i; k < n; ++k) votes[static_cast<std::size_t>(k)] = next;
  }
}

void check_enumerable(int n) {
  if (n < 1 || n > 10) throw DataError("vote multiset enumeration needs 1 <= n <= 10, got " + std::to_string(n));
}

double predict_mos(ModelKind model, double loss, double delay, const CodecProfile& profile,
                   const SubjectiveSurface& surface) {
  return estimate(model, NetworkCondition(loss, delay), profile, surface).mos;
}

}  // namespace

std::vector<ScenarioAggregate> TestSet::scenario_aggregates() const {
  if (!aggregates.empty()) return aggregates;
  std::vector<ScenarioAggregate> out;
  std::vector<std::vector<double>> scores;
  for (const auto& r : records) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& a) { return a.scenario_id == r.scenario_id; });
    if (it == out.end()) {
      out.push_back({r.scenario_id, r.loss_percent, r.delay_ms, 0.0, 0.0, 0});
      scores.emplace_back();
      it = std::prev(out.end());
    } else if (it->loss_percent != r.loss_percent || it->delay_ms != r.delay_ms) {
      throw DataError("scenario " + r.scenario_id + " in test set " + id + " has inconsistent conditions");
    }
    scores[static_cast<std::size_t>(it - out.begin())].push_back(r.score);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& s = scores[i];
    const double n = static_cast<double>(s.size());
    out[i].n = static_cast<int>(s.size());
    out[i].mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : s) ss += (v - out[i].mean) * (v - out[i].mean);
    out[i].sd = s.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  return out;
}

std::string_view to_string(EvaluationMode mode) {
  return mode == EvaluationMode::per_record ? "per-record" : "scenario-mean";
}

std::string_view mape_band(double mape_percent) {
  if (mape_percent == 0.0) return "perfect forecast";
  if (mape_percent < 10.0) return "highly accurate forecast";
  if (mape_percent < 20.0) return "good forecast";
  if (mape_percent < 50.0) return "reasonable forecast";
  return "inaccurate forecast";
}

double weighted_mape(std::span<const double> predicted, std::span<const double> observed,
                     std::span<const double> weights) {
  if (predicted.size() != observed.size() || predicted.size() != weights.size()) {
    throw DataError("MAPE inputs differ in length: " + std::to_string(predicted.size()) + " predicted, " +
                    std::to_string(observed.size()) + " observed, " + std::to_string(weights.size()) + " weights");
  }
  if (observed.empty()) throw DataError("MAPE of an empty series");
  double sum = 0.0;
  double total_weight = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (observed[i] == 0.0) throw DataError("MAPE undefined: observed value at index " + std::to_string(i) + " is 0");
    if (!(weights[i] >= 0.0)) throw DataError("negative MAPE weight at index " + std::to_string(i));
    sum += weights[i] * std::abs(predicted[i] - observed[i]) / std::abs(observed[i]);
    total_weight += weights[i];
  }
  if (total_weight <= 0.0) throw DataError("MAPE weights sum to zero");
  return 100.0 * sum / total_weight;
}

double mape(std::span<const double> predicted, std::span<const double> observed) {
  const std::vector<double> ones(observed.size(), 1.0);
  return weighted_mape(predicted, observed, ones);
}

double error_reduction(double baseline_mape, double enhanced_mape) {
  if (!(baseline_mape > 0.0)) throw DataError("error reduction needs a positive baseline MAPE");
  return (baseline_mape - enhanced_mape) / baseline_mape * 100.0;
}

std::vector<ScoreMultiset> reconstruct_score_multisets(double mean, double sd, int n, double tolerance) {
  check_enumerable(n);
  std::vector<ScoreMultiset> out;
  const double slack = tolerance + 1e-9;
  for_each_multiset(n, [&](const ScoreMultiset& votes) {
    const auto s = stats_of(votes);
    if (std::abs(s.mean - mean) <= slack && std::abs(s.sd - sd) <= slack) out.push_back(votes);
  });
  return out;
}

std::vector<ScoreMultiset> nearest_score_multisets(double mean, double sd, int n) {
  check_enumerable(n);
  std::vector<ScoreMultiset> out;
  double best = std::numeric_limits<double>::infinity();
  for_each_multiset(n, [&](const ScoreMultiset& votes) {
    const auto s = stats_of(votes);
    const double d = std::max(std::abs(s.mean - mean), std::abs(s.sd - sd));
    if (d < best - 1e-9) {
      best = d;
      out.clear();
    }
    if (d <= best + 1e-9) out.push_back(votes);
  });
  return out;
}

std::vector<ScoreMultiset> plausible_score_multisets(double mean, double sd, int n, bool* exact) {
  auto found = reconstruct_score_multisets(mean, sd, n);
  if (exact) *exact = !found.empty();
  if (found.empty()) found = nearest_score_multisets(mean, sd, n);
  return found;
}

MapeInterval per_record_mape_bounds(const std::vector<ScenarioAggregate>& aggregates, ModelKind model,
                                    const CodecProfile& profile, const SubjectiveSurface& surface) {
  MapeInterval interval;
  double low = 0.0;
  double high = 0.0;
  int total = 0;
  for (const auto& agg : aggregates) {
    const double pred = predict_mos(model, agg.loss_percent, agg.delay_ms, profile, surface);
    bool exact = false;
    const auto candidates = plausible_score_multisets(agg.mean, agg.sd, agg.n, &exact);
    if (!exact) interval.irreproducible_cells.push_back(agg.scenario_id);
    double cell_low = std::numeric_limits<double>::infinity();
    double cell_high = -std::numeric_limits<double>::infinity();
    for (const auto& votes : candidates) {
      double s = 0.0;
      for (int v : votes) s += std::abs(pred - v) / v;
      cell_low = std::min(cell_low, s);
      cell_high = std::max(cell_high, s);
    }
    low += cell_low;
    high += cell_high;
    total += agg.n;
  }
  if (total == 0) throw DataError("per-record MAPE bounds of an empty test set");
  interval.low = 100.0 * low / total;
  interval.high = 100.0 * high / total;
  return interval;
}

const ModelMape& EvaluationReport::cell(const std::string& test_set, ModelKind model) const {
  for (const auto& ts : test_sets) {
    if (ts.test_set != test_set) continue;
    for (const auto& m : ts.models) {
      if (m.model == model) return m;
    }
  }
  throw std::out_of_range("no MAPE cell for " + test_set + " / " + std::string(to_string(model)));
}

EvaluationReport evaluate_models(const std::vector<TestSet>& testsets, const std::vector<ModelKind>& models,
                                 const CodecProfile& profile, const SubjectiveSurface& surface,
                                 const EvaluationOptions& options) {
  if (testsets.empty()) throw DataError("no test sets to evaluate");
  if (models.empty()) throw DataError("no models to evaluate");

  std::vector<const TestSet*> ordered;
  for (const auto& ts : testsets) ordered.push_back(&ts);
  std::stable_sort(ordered.begin(), ordered.end(), [](const TestSet* a, const TestSet* b) { return a->id < b->id; });

  EvaluationReport report;
  report.mode = options.mode;
  std::map<ModelKind, double> sums;

  for (const TestSet* ts : ordered) {
    const auto aggregates = ts->scenario_aggregates();
    if (aggregates.empty()) throw DataError("test set " + ts->id + " is empty");
    for (const auto& agg : aggregates) {
      const NetworkCondition cond(agg.loss_percent, agg.delay_ms);
      if (!cond.in_domain()) {
        throw DomainError("test set " + ts->id + " scenario " + agg.scenario_id + ": " + cond.domain_violation());
      }
    }
    if (options.mode == EvaluationMode::per_record && ts->records.empty()) {
      throw DataError("per-record evaluation needs raw records; test set " + ts->id + " only has aggregates");
    }

    TestSetResult result;
    result.test_set = ts->id;
    for (const auto& agg : aggregates) result.record_count += static_cast<std::size_t>(agg.n);

    for (ModelKind model : models) {
      std::vector<double> predicted;
      std::vector<double> observed;
      std::vector<double> weights;
      if (options.mode == EvaluationMode::per_record) {
        for (const auto& r : ts->records) {
          predicted.push_back(predict_mos(model, r.loss_percent, r.delay_ms, profile, surface));
          observed.push_back(r.score);
          weights.push_back(1.0);
        }
      } else {
        for (const auto& agg : aggregates) {
          predicted.push_back(predict_mos(model, agg.loss_percent, agg.delay_ms, profile, surface));
          observed.push_back(agg.mean);
          weights.push_back(agg.n);
        }
      }
      ModelMape cell;
      cell.model = model;
      cell.mape = weighted_mape(predicted, observed, weights);
      cell.band = mape_band(cell.mape);
      if (options.per_record_bounds) cell.per_record_bounds = per_record_mape_bounds(aggregates, model, profile, surface);
      sums[model] += cell.mape;
      result.models.push_back(std::move(cell));
    }
    report.test_sets.push_back(std::move(result));
  }

  for (const auto& [model, sum] : sums) report.average_mape[model] = sum / static_cast<double>(ordered.size());

  const auto has = [&](ModelKind m) { return report.average_mape.count(m) > 0; };
  if (has(ModelKind::simplified) && has(ModelKind::enhanced) && report.average_mape[ModelKind::simplified] > 0.0) {
    report.baseline = ModelKind::simplified;
    report.improved = ModelKind::enhanced;
    report.error_reduction_percent =
        error_reduction(report.average_mape[ModelKind::simplified], report.average_mape[ModelKind::enhanced]);
  }
  return report;
}

}  // namespace voipqoe
