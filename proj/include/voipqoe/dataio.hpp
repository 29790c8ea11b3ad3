#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "voipqoe/evaluation.hpp"
#include "voipqoe/model_core.hpp"

namespace voipqoe {

/// Validation failure carrying every offending line.
class ValidationError : public DataError {
 public:
  struct Issue {
    std::size_t line;
    std::string message;
  };

  explicit ValidationError(std::vector<Issue> issues);
  const std::vector<Issue>& issues() const { return issues_; }

 private:
  std::vector<Issue> issues_;
};

/// Reads `scenario_id,loss_percent,delay_ms,score,test_set[,participant_id]`.
/// Columns may appear in any order; the header row is required.
std::vector<SubjectiveRecord> load_subjective_records(std::istream& in);
void write_subjective_records(std::ostream& out, const std::vector<SubjectiveRecord>& records);

/// Groups records into test sets ordered by id.
std::vector<TestSet> group_into_testsets(const std::vector<SubjectiveRecord>& records);

/// Parses a JSON profile document (array of profiles, or {"profiles": [...]})
/// on top of the built-in `g729`. Blank input yields the built-ins only.
std::map<std::string, CodecProfile> load_codec_profiles(std::istream& in);
std::map<std::string, CodecProfile> load_codec_profiles(const std::string& text);
std::map<std::string, CodecProfile> builtin_codec_profiles();

nlohmann::json to_json(const CodecProfile& profile);
CodecProfile codec_profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const QualityEstimate& estimate);

struct MetricRecord {
  std::string ts;
  /// Seconds since the Unix epoch (ISO-8601 input) or the raw numeric stamp.
  double seconds = 0.0;
  double loss_percent = 0.0;
  double delay_ms = 0.0;
  std::optional<std::string> stream_id;
};

struct MetricLineError {
  std::size_t line;
  std::string message;
};

using MetricItem = std::variant<MetricRecord, MetricLineError>;

enum class StreamErrorPolicy { skip_and_report, abort };

/// Sequential reader over one JSON object per line. Blank lines are skipped.
class MetricStreamReader {
 public:
  explicit MetricStreamReader(std::istream& in, StreamErrorPolicy policy = StreamErrorPolicy::skip_and_report);

  /// Next record or per-line error; nullopt at end of input. Under the abort
  /// policy a malformed line throws DataError instead.
  std::optional<MetricItem> next();

 private:
  std::istream* in_;
  StreamErrorPolicy policy_;
  std::size_t line_ = 0;
};

/// Parses a single metric line. Throws DataError.
MetricRecord parse_metric_line(const std::string& line);

/// Seconds since epoch for `YYYY-MM-DDTHH:MM:SS[.fff](Z|+hh:mm)`. Throws DataError.
double parse_iso8601(const std::string& text);

}  // namespace voipqoe
