#include "voipqoe/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

namespace voipqoe {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_number(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string join_issues(const std::vector<ValidationError::Issue>& issues) {
  std::ostringstream os;
  os << issues.size() << " invalid line(s):";
  for (const auto& i : issues) os << "\n  line " << i.line << ": " << i.message;
  return os.str();
}

constexpr const char* kRequiredColumns[] = {"scenario_id", "loss_percent", "delay_ms", "score", "test_set"};

}  // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : DataError(join_issues(issues)), issues_(std::move(issues)) {}

std::vector<SubjectiveRecord> load_subjective_records(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv(line);
      break;
    }
  }
  if (header.empty()) throw ValidationError({{1, "missing header row"}});

  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  std::vector<ValidationError::Issue> issues;
  for (const char* name : kRequiredColumns) {
    if (!column.count(name)) issues.push_back({line_no, std::string("missing column '") + name + "'"});
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  const bool has_participant = column.count("participant_id") > 0;

  std::vector<SubjectiveRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      issues.push_back({line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size())});
      continue;
    }
    auto field = [&](const char* name) -> const std::string& { return fields[column.at(name)]; };
    std::vector<std::string> problems;
    auto number = [&](const char* name) {
      const auto v = parse_number(field(name));
      if (!v) problems.push_back(std::string(name) + " '" + field(name) + "' is not a number");
      return v.value_or(0.0);
    };

    SubjectiveRecord r;
    r.scenario_id = field("scenario_id");
    r.test_set = field("test_set");
    r.loss_percent = number("loss_percent");
    r.delay_ms = number("delay_ms");
    r.score = number("score");
    if (r.scenario_id.empty()) problems.push_back("empty scenario_id");
    if (r.test_set.empty()) problems.push_back("empty test_set");
    if (r.loss_percent < 0.0) problems.push_back("negative loss_percent");
    if (r.delay_ms < 0.0) problems.push_back("negative delay_ms");
    if (r.score < 1.0 || r.score > 5.0) problems.push_back("score " + field("score") + " outside [1, 5]");
    if (has_participant && !field("participant_id").empty()) r.participant_id = field("participant_id");

    if (problems.empty()) {
      records.push_back(std::move(r));
    } else {
      std::string msg;
      for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
      issues.push_back({line_no, msg});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return records;
}

void write_subjective_records(std::ostream& out, const std::vector<SubjectiveRecord>& records) {
  const bool with_participant =
      std::any_of(records.begin(), records.end(), [](const auto& r) { return r.participant_id.has_value(); });
  out << "scenario_id,loss_percent,delay_ms,score,test_set" << (with_participant ? ",participant_id" : "") << '\n';
  for (const auto& r : records) {
    out << r.scenario_id << ',' << format_number(r.loss_percent) << ',' << format_number(r.delay_ms) << ','
        << format_number(r.score) << ',' << r.test_set;
    if (with_participant) out << ',' << r.participant_id.value_or("");
    out << '\n';
  }
}

std::vector<TestSet> group_into_testsets(const std::vector<SubjectiveRecord>& records) {
  std::map<std::string, TestSet> by_id;
  for (const auto& r : records) {
    auto& ts = by_id[r.test_set];
    ts.id = r.test_set;
    ts.records.push_back(r);
  }
  std::vector<TestSet> out;
  for (auto& [id, ts] : by_id) out.push_back(std::move(ts));
  return out;
}

std::map<std::string, CodecProfile> builtin_codec_profiles() {
  return {{"g729", CodecProfile::g729()}};
}

nlohmann::json to_json(const CodecProfile& profile) {
  nlohmann::json j = {{"name", profile.name},       {"ro", profile.ro},         {"advantage", profile.advantage},
                      {"loss_a", profile.loss_a},   {"loss_b", profile.loss_b}, {"loss_c", profile.loss_c},
                      {"loss_scale", profile.loss_scale}};
  if (profile.bias) {
    const auto& c = profile.bias->coefficients;
    j["bias"] = std::vector<double>(c.data(), c.data() + c.size());
  }
  return j;
}

namespace {

CodecProfile profile_from_json(const nlohmann::json& j, const std::map<std::string, CodecProfile>& base) {
  if (!j.is_object()) throw ConfigError("codec profile entry must be an object");
  if (!j.contains("name") || !j["name"].is_string()) throw ConfigError("codec profile entry needs a string 'name'");

  CodecProfile p;
  p.name = j["name"].get<std::string>();
  const auto inherited = base.find(p.name);
  const bool overrides = inherited != base.end();
  if (overrides) p = inherited->second;

  static const std::set<std::string> known = {"name",   "ro",     "advantage",  "loss_a",
                                              "loss_b", "loss_c", "loss_scale", "bias"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("codec profile '" + p.name + "': unknown key '" + key + "'");
  }

  auto read = [&](const char* key, double& dst, bool required) {
    if (!j.contains(key)) {
      if (required && !overrides) throw ConfigError("codec profile '" + p.name + "': missing '" + key + "'");
      return;
    }
    if (!j[key].is_number()) throw ConfigError("codec profile '" + p.name + "': '" + key + "' must be a number");
    dst = j[key].get<double>();
  };
  read("ro", p.ro, false);
  read("advantage", p.advantage, false);
  read("loss_a", p.loss_a, true);
  read("loss_b", p.loss_b, true);
  read("loss_c", p.loss_c, true);
  read("loss_scale", p.loss_scale, false);

  if (j.contains("bias")) {
    const auto& b = j["bias"];
    if (b.is_null()) {
      p.bias.reset();
    } else {
      if (!b.is_array() || b.size() != 9) {
        throw ConfigError("codec profile '" + p.name + "': 'bias' must list exactly 9 coefficients a1..a9");
      }
      BiasPolynomial poly;
      for (std::size_t k = 0; k < 9; ++k) {
        if (!b[k].is_number()) throw ConfigError("codec profile '" + p.name + "': bias coefficients must be numbers");
        poly.coefficients(static_cast<Eigen::Index>(k)) = b[k].get<double>();
      }
      p.bias = poly;
    }
  }
  p.validate();
  return p;
}

}  // namespace

CodecProfile codec_profile_from_json(const nlohmann::json& j) { return profile_from_json(j, {}); }

std::map<std::string, CodecProfile> load_codec_profiles(const std::string& text) {
  auto profiles = builtin_codec_profiles();
  if (trim(text).empty()) return profiles;

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("codec profile config is not valid JSON: ") + e.what());
  }
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("profiles")) throw ConfigError("codec profile config object needs a 'profiles' array");
    list = &doc["profiles"];
  }
  if (!list->is_array()) throw ConfigError("codec profile config must be an array of profiles");

  const auto builtins = builtin_codec_profiles();
  std::set<std::string> seen;
  for (const auto& entry : *list) {
    auto p = profile_from_json(entry, builtins);
    if (!seen.insert(p.name).second) throw ConfigError("duplicate codec profile name '" + p.name + "'");
    profiles[p.name] = std::move(p);
  }
  return profiles;
}

std::map<std::string, CodecProfile> load_codec_profiles(std::istream& in) {
  std::ostringstream os;
  os << in.rdbuf();
  return load_codec_profiles(os.str());
}

nlohmann::json to_json(const QualityEstimate& q) {
  return {{"model", std::string(to_string(q.model))},
          {"r_value", q.r_value},
          {"mos", q.mos},
          {"id", q.id},
          {"ipl", q.ipl},
          {"bias", q.bias},
          {"extrapolated", q.extrapolated}};
}

double parse_iso8601(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double sec = 0.0;
  char tail[16] = {0};
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%lf%n", &y, &mo, &d, &h, &mi, &sec, &consumed) != 6) {
    throw DataError("timestamp '" + text + "' is not ISO-8601 (YYYY-MM-DDTHH:MM:SS[.fff]Z)");
  }
  const std::string zone = text.substr(static_cast<std::size_t>(consumed));
  double offset_s = 0.0;
  if (zone != "Z" && !zone.empty()) {
    int oh = 0, om = 0;
    char sign = 0;
    if (std::sscanf(zone.c_str(), "%c%2d:%2d%15s", &sign, &oh, &om, tail) != 3 || (sign != '+' && sign != '-')) {
      throw DataError("timestamp '" + text + "' has an unrecognised zone suffix");
    }
    offset_s = (sign == '+' ? 1 : -1) * (oh * 3600.0 + om * 60.0);
  }
  using namespace std::chrono;
  const year_month_day date{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!date.ok() || h > 23 || mi > 59 || sec < 0.0 || sec >= 61.0) {
    throw DataError("timestamp '" + text + "' is not a valid calendar instant");
  }
  const auto days_since_epoch = sys_days(date).time_since_epoch().count();
  return static_cast<double>(days_since_epoch) * 86400.0 + h * 3600.0 + mi * 60.0 + sec - offset_s;
}

MetricRecord parse_metric_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("not a JSON object: ") + e.what());
  }
  if (!j.is_object()) throw DataError("metric line must be a JSON object");

  MetricRecord r;
  if (!j.contains("ts")) throw DataError("missing 'ts'");
  if (j["ts"].is_string()) {
    r.ts = j["ts"].get<std::string>();
    r.seconds = parse_iso8601(r.ts);
  } else if (j["ts"].is_number()) {
    r.seconds = j["ts"].get<double>();
    r.ts = format_number(r.seconds);
  } else {
    throw DataError("'ts' must be an ISO-8601 string or a number");
  }

  auto metric = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) throw DataError(std::string("missing numeric '") + key + "'");
    const double v = j[key].get<double>();
    if (!std::isfinite(v) || v < 0.0) throw DataError(std::string("'") + key + "' must be finite and >= 0");
    return v;
  };
  r.loss_percent = metric("loss_percent");
  r.delay_ms = metric("delay_ms");
  if (j.contains("stream_id")) {
    if (!j["stream_id"].is_string()) throw DataError("'stream_id' must be a string");
    r.stream_id = j["stream_id"].get<std::string>();
  }
  return r;
}

MetricStreamReader::MetricStreamReader(std::istream& in, StreamErrorPolicy policy) : in_(&in), policy_(policy) {}

std::optional<MetricItem> MetricStreamReader::next() {
  std::string line;
  while (std::getline(*in_, line)) {
    ++line_;
    if (trim(line).empty()) continue;
    try {
      return MetricItem{parse_metric_line(line)};
    } catch (const DataError& e) {
      if (policy_ == StreamErrorPolicy::abort) throw DataError("line " + std::to_string(line_) + ": " + e.what());
      return MetricItem{MetricLineError{line_, e.what()}};
    }
  }
  return std::nullopt;
}

}  // namespace voipqoe
