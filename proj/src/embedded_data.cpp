#include "voipqoe/embedded_data.hpp"

namespace voipqoe::embedded {

const std::vector<SurfaceScenario>& surface_scenarios() {
  // Table 2, G.729, 250 participants in total.
  static const std::vector<SurfaceScenario> rows = {
      {"S01", 0, 0, 24},   {"S02", 2, 0, 30},   {"S03", 4, 0, 24},   {"S04", 6, 0, 30},   {"S05", 10, 0, 24},
      {"S06", 0, 400, 28}, {"S07", 3, 400, 32}, {"S08", 5, 400, 30}, {"S09", 10, 400, 28},
  };
  return rows;
}

const std::vector<TestSet>& table5_testsets() {
  struct Row {
    const char* id;
    double loss;
    double delay;
    int n;
    double cells[4][2];  // (mean, sd) for TS1..TS4
  };
  // Table 5, MOS-CQS +- SD per test set.
  static const Row rows[] = {
      {"S1", 0, 0, 6, {{4.00, 0.63}, {4.17, 0.41}, {3.86, 0.38}, {4.29, 0.76}}},
      {"S2", 0, 400, 7, {{4.00, 0.82}, {3.86, 0.38}, {3.86, 0.38}, {4.29, 0.76}}},
      {"S3", 1, 200, 7, {{4.14, 0.38}, {4.00, 0.58}, {3.86, 0.69}, {4.00, 0.58}}},
      {"S4", 2, 0, 7, {{3.71, 0.49}, {3.86, 0.38}, {3.86, 0.38}, {3.86, 0.38}}},
      {"S5", 3, 400, 7, {{3.88, 0.64}, {4.25, 0.71}, {3.50, 0.53}, {3.63, 0.52}}},
      {"S6", 4, 0, 6, {{4.17, 0.75}, {3.67, 0.82}, {3.67, 0.52}, {3.50, 0.57}}},
      {"S7", 5, 400, 7, {{3.57, 0.53}, {3.71, 0.49}, {3.71, 0.49}, {3.71, 0.49}}},
      {"S8", 6, 0, 7, {{3.43, 0.53}, {4.00, 0.00}, {3.57, 0.79}, {3.29, 0.49}}},
      {"S9", 10, 0, 6, {{3.17, 0.41}, {3.83, 0.41}, {3.33, 0.52}, {3.33, 0.82}}},
      {"S10", 10, 400, 7, {{3.43, 0.53}, {3.43, 0.53}, {3.43, 0.79}, {3.14, 0.38}}},
  };
  static const std::vector<TestSet> sets = [] {
    std::vector<TestSet> out;
    for (int t = 0; t < 4; ++t) {
      TestSet ts;
      ts.id = "TS" + std::to_string(t + 1);
      for (const auto& r : rows) {
        ts.aggregates.push_back({r.id, r.loss, r.delay, r.cells[t][0], r.cells[t][1], r.n});
      }
      out.push_back(std::move(ts));
    }
    return out;
  }();
  return sets;
}

const std::vector<std::pair<std::string, std::string>>& table5_irreproducible_cells() {
  // S5's means (3.88, 4.25, 3.50, 3.63) are multiples of 1/8, not 1/7.
  static const std::vector<std::pair<std::string, std::string>> cells = {
      {"TS1", "S5"}, {"TS2", "S5"}, {"TS3", "S1"}, {"TS3", "S5"}, {"TS4", "S1"}, {"TS4", "S5"}, {"TS4", "S6"},
  };
  return cells;
}

const std::vector<GoldenRow>& table6_golden() {
  // Table 6.
  static const std::vector<GoldenRow> rows = {
      {"S1", 0, 0, 83.200, 4.139, 83.633, 4.149},    {"S2", 0, 400, 49.103, 2.528, 80.191, 4.033},
      {"S3", 1, 200, 71.265, 3.656, 79.471, 4.004},  {"S4", 2, 0, 74.646, 3.807, 76.552, 3.889},
      {"S5", 3, 400, 37.160, 1.927, 74.659, 3.807},  {"S6", 4, 0, 68.270, 3.515, 71.934, 3.690},
      {"S7", 5, 400, 31.503, 1.672, 71.950, 3.685},  {"S8", 6, 0, 63.186, 3.263, 68.894, 3.548},
      {"S9", 10, 0, 55.336, 2.856, 65.986, 3.403},   {"S10", 10, 400, 21.238, 1.290, 64.417, 3.326},
  };
  return rows;
}

const std::vector<TermSetScore>& table3_scores() {
  // Table 3.
  static const std::vector<TermSetScore> rows = {
      {"poly32", 0.9953, 0.8872, false},
      {"poly23", 0.9964, 0.7843, true},
      {"poly33", 0.9964, 0.7879, false},
  };
  return rows;
}

const std::vector<PublishedMape>& table7_mape() {
  // Table 7. TS2 simplified is 29.30 in the running text.
  static const std::vector<PublishedMape> rows = {
      {"TS1", 27.85, 12.12},
      {"TS2", 29.23, 10.28},
      {"TS3", 28.50, 11.96},
      {"TS4", 28.32, 12.49},
  };
  return rows;
}

std::vector<SubjectiveRecord> table5_expanded_records() {
  std::vector<SubjectiveRecord> out;
  for (const auto& ts : table5_testsets()) {
    int participant = 0;
    for (const auto& agg : ts.aggregates) {
      const auto candidates = plausible_score_multisets(agg.mean, agg.sd, agg.n);
      // Candidates come out of the enumerator in lexicographic order.
      for (int vote : candidates.front()) {
        out.push_back({agg.scenario_id, agg.loss_percent, agg.delay_ms, static_cast<double>(vote), ts.id,
                       ts.id + "-P" + std::to_string(++participant)});
      }
    }
  }
  return out;
}

}  // namespace voipqoe::embedded
