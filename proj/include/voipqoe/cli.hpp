#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "voipqoe/dataio.hpp"
#include "voipqoe/model_core.hpp"

namespace voipqoe {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitDomain = 2,
  kExitData = 3,
  kExitMismatch = 4,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "start:stop[:step]" (inclusive, step defaults to 1), "a,b,c", or a single
/// value. Throws UsageError on an empty or malformed axis.
std::vector<double> parse_axis(const std::string& text);

struct SweepRow {
  double loss_percent = 0.0;
  double delay_ms = 0.0;
  bool extrapolated = false;
  std::map<ModelKind, QualityEstimate> estimates;
};

/// Delay-major, then loss.
std::vector<SweepRow> sweep(const std::vector<double>& loss_percent, const std::vector<double>& delay_ms,
                            const std::vector<ModelKind>& models, const CodecProfile& profile,
                            const SubjectiveSurface& surface, Extrapolation policy);

/// Tumbling-window aggregate of a metric stream.
struct MonitorWindow {
  std::size_t index = 0;
  std::string first_ts;
  std::string last_ts;
  std::size_t records = 0;
  std::size_t errors = 0;
  double mean_loss_percent = 0.0;
  double mean_delay_ms = 0.0;
  QualityEstimate simplified;
  QualityEstimate enhanced;
};

struct WindowPolicy {
  /// Close after this many records (used when `seconds` is unset).
  std::size_t count = 10;
  /// Close when a record falls outside [start, start + seconds).
  std::optional<double> seconds;
};

/// Sequential read -> aggregate -> score pipeline. Memory is bounded by one
/// window's running sums.
class WindowAggregator {
 public:
  WindowAggregator(WindowPolicy policy, CodecProfile profile);

  /// Returns a window when `record` closes the previous one.
  std::optional<MonitorWindow> push(const MetricRecord& record);
  void note_error() { ++pending_errors_; }
  /// Closes the final partial window.
  std::optional<MonitorWindow> finish();

 private:
  std::optional<MonitorWindow> close();

  WindowPolicy policy_;
  CodecProfile profile_;
  std::size_t next_index_ = 0;
  std::size_t count_ = 0;
  std::size_t pending_errors_ = 0;
  double loss_sum_ = 0.0;
  double delay_sum_ = 0.0;
  double window_start_ = 0.0;
  std::optional<double> origin_;
  std::string first_ts_;
  std::string last_ts_;
};

/// Runs the command line. argv[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace voipqoe
