#include "voipqoe/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "voipqoe/embedded_data.hpp"
#include "voipqoe/evaluation.hpp"
#include "voipqoe/reproduce.hpp"
#include "voipqoe/surface_fit.hpp"

namespace voipqoe {

namespace {

constexpr const char* kProfilesEnv = "VOIPQOE_PROFILES";

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

/// Shortest round-trip text for CSV output.
std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

enum class Format { table, csv, json };

/// Options shared by every subcommand.
struct CliConfig {
  std::string codec = "g729";
  std::string profiles_path;
  std::string format = "table";
  bool extrapolate = false;

  Format output() const {
    if (format == "csv") return Format::csv;
    if (format == "json") return Format::json;
    return Format::table;
  }
  Extrapolation policy() const { return extrapolate ? Extrapolation::allow : Extrapolation::forbid; }
};

std::vector<ModelKind> parse_models(const std::string& text) {
  std::vector<ModelKind> models;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    models.push_back(model_kind_from_string(item));
  }
  if (models.empty()) throw UsageError("no models selected");
  return models;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

CodecProfile resolve_profile(const CliConfig& cfg) {
  std::string path = cfg.profiles_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kProfilesEnv)) path = env;
  }
  const auto profiles = path.empty() ? builtin_codec_profiles() : load_codec_profiles(read_file(path));
  const auto it = profiles.find(cfg.codec);
  if (it == profiles.end()) throw ConfigError("unknown codec profile '" + cfg.codec + "'");
  return it->second;
}

void add_common(CLI::App* cmd, CliConfig& cfg) {
  cmd->add_option("--codec", cfg.codec, "Codec profile name")->capture_default_str();
  cmd->add_option("--profiles", cfg.profiles_path,
                  std::string("JSON codec profile file (default: $") + kProfilesEnv + ")");
  cmd->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();
  cmd->add_flag("--extrapolate", cfg.extrapolate, "Compute outside loss 0-10 %, delay 0-400 ms and flag the result");
}

// predict ------------------------------------------------------------------

struct PredictArgs {
  double loss = 0.0;
  double delay = 0.0;
  std::string model = "enhanced";
};

int cmd_predict(const CliConfig& cfg, const PredictArgs& a, std::ostream& out) {
  const auto profile = resolve_profile(cfg);
  const NetworkCondition cond(a.loss, a.delay);
  const auto q = estimate(model_kind_from_string(a.model), cond, profile, SubjectiveSurface::g729_thai(), cfg.policy());
  switch (cfg.output()) {
    case Format::json: {
      auto j = to_json(q);
      j["loss_percent"] = a.loss;
      j["delay_ms"] = a.delay;
      j["codec"] = profile.name;
      out << j.dump() << '\n';
      break;
    }
    case Format::csv:
      out << "model,loss_percent,delay_ms,r_value,mos,id,ipl,bias,extrapolated\n"
          << to_string(q.model) << ',' << num(a.loss) << ',' << num(a.delay) << ',' << num(q.r_value) << ','
          << num(q.mos) << ',' << num(q.id) << ',' << num(q.ipl) << ',' << num(q.bias) << ','
          << (q.extrapolated ? "true" : "false") << '\n';
      break;
    case Format::table:
      out << strf("codec         %s\n", profile.name.c_str()) << strf("model         %s\n", to_string(q.model).data())
          << strf("loss_percent  %g\n", a.loss) << strf("delay_ms      %g\n", a.delay)
          << strf("R             %.3f\n", q.r_value) << strf("MOS           %.3f\n", q.mos)
          << strf("Id            %.3f\n", q.id) << strf("Ipl           %.3f\n", q.ipl)
          << strf("bias          %.3f\n", q.bias) << "extrapolated  " << (q.extrapolated ? "yes" : "no") << '\n';
      break;
  }
  return kExitOk;
}

// sweep --------------------------------------------------------------------

struct SweepArgs {
  std::string loss;
  std::string delay = "0";
  std::string models = "simplified,enhanced,subjective";
};

void render_sweep(std::ostream& out, Format format, const std::vector<SweepRow>& rows,
                  const std::vector<ModelKind>& models) {
  if (format == Format::json) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json j = {{"loss_percent", row.loss_percent}, {"delay_ms", row.delay_ms},
                          {"extrapolated", row.extrapolated}};
      for (ModelKind m : models) {
        const auto& q = row.estimates.at(m);
        j[std::string(to_string(m))] = {{"r_value", q.r_value}, {"mos", q.mos}};
      }
      doc.push_back(std::move(j));
    }
    out << doc.dump() << '\n';
    return;
  }
  const char* sep = format == Format::csv ? "," : "  ";
  out << "delay_ms" << sep << "loss_percent";
  for (ModelKind m : models) out << sep << "r_" << to_string(m) << sep << "mos_" << to_string(m);
  out << sep << "extrapolated\n";
  for (const auto& row : rows) {
    if (format == Format::csv) {
      out << num(row.delay_ms) << ',' << num(row.loss_percent);
      for (ModelKind m : models) out << ',' << num(row.estimates.at(m).r_value) << ',' << num(row.estimates.at(m).mos);
      out << ',' << (row.extrapolated ? "true" : "false") << '\n';
    } else {
      out << strf("%-8g  %-12g", row.delay_ms, row.loss_percent);
      for (ModelKind m : models) out << strf("  %8.3f  %6.3f", row.estimates.at(m).r_value, row.estimates.at(m).mos);
      out << "  " << (row.extrapolated ? "yes" : "no") << '\n';
    }
  }
}

int cmd_sweep(const CliConfig& cfg, const SweepArgs& a, std::ostream& out) {
  const auto loss = parse_axis(a.loss);
  const auto delay = parse_axis(a.delay);
  const auto models = parse_models(a.models);
  const auto profile = resolve_profile(cfg);
  const auto rows = sweep(loss, delay, models, profile, SubjectiveSurface::g729_thai(), cfg.policy());
  render_sweep(out, cfg.output(), rows, models);
  return kExitOk;
}

// derive-bias --------------------------------------------------------------

struct DeriveArgs {
  std::string grid_loss = "0:10:1";
  std::string grid_delay = "0:400:50";
  std::string termset = "poly23";
  std::string denominator = "n-p";
  std::string output;
  bool scenarios = false;
};

RmseDenominator parse_denominator(const std::string& s) {
  if (s == "n-p") return RmseDenominator::n_minus_p;
  if (s == "n") return RmseDenominator::n;
  throw UsageError("--rmse-denominator must be 'n-p' or 'n'");
}

nlohmann::json fit_to_json(const FitResult& fit) {
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t k = 0; k < fit.termset.size(); ++k) {
    terms.push_back({{"term", fit.termset.term_label(k)},
                     {"coefficient", fit.coefficients(static_cast<Eigen::Index>(k))}});
  }
  return {{"termset", fit.termset.name()}, {"terms", terms},         {"r_squared", fit.r_squared},
          {"rmse", fit.rmse},              {"n_samples", fit.n_samples}};
}

int cmd_derive_bias(const CliConfig& cfg, const DeriveArgs& a, std::ostream& out) {
  const auto profile = resolve_profile(cfg);
  const auto surface = SubjectiveSurface::g729_thai();
  const auto termset = TermSet::from_name(a.termset);
  GridSpec grid{parse_axis(a.grid_loss), parse_axis(a.grid_delay)};

  std::vector<Sample> samples;
  if (a.scenarios) {
    std::vector<NetworkCondition> conds;
    for (const auto& s : embedded::surface_scenarios()) conds.emplace_back(s.loss_percent, s.delay_ms);
    samples = bias_samples(surface, profile, conds);
  } else {
    samples = bias_samples(surface, profile, grid);
  }
  const auto fit = fit_surface(samples, termset, parse_denominator(a.denominator));

  const auto reference = BiasPolynomial::g729_thai();
  double max_delta = 0.0;
  for (const auto& s : samples) max_delta = std::max(max_delta, std::abs(fit(s.x, s.y) - reference(s.x, s.y)));

  if (!a.output.empty()) {
    // Loadable through --profiles; non-poly23 fits carry no bias vector.
    nlohmann::json entry = to_json(profile);
    entry["bias"] = nullptr;
    if (fit.termset == TermSet::poly23()) {
      const auto& c = fit.coefficients;
      entry["bias"] = std::vector<double>(c.data(), c.data() + c.size());
    }
    nlohmann::json fragment;
    fragment["profiles"] = nlohmann::json::array({entry});
    fragment["fit"] = fit_to_json(fit);
    std::ofstream file(a.output);
    if (!file) throw DataError("cannot write '" + a.output + "'");
    file << fragment.dump(2) << '\n';
  }

  switch (cfg.output()) {
    case Format::json: {
      auto j = fit_to_json(fit);
      j["max_abs_delta_vs_builtin"] = max_delta;
      j["sample_source"] = a.scenarios ? "scenarios" : "grid";
      if (!a.output.empty()) j["written"] = a.output;
      out << j.dump() << '\n';
      break;
    }
    case Format::csv:
      out << "term,coefficient\n";
      for (std::size_t k = 0; k < fit.termset.size(); ++k) {
        out << fit.termset.term_label(k) << ',' << num(fit.coefficients(static_cast<Eigen::Index>(k))) << '\n';
      }
      out << "r_squared," << num(fit.r_squared) << "\nrmse," << num(fit.rmse) << "\nmax_abs_delta_vs_builtin,"
          << num(max_delta) << '\n';
      break;
    case Format::table:
      out << strf("bias fit: %s over %zu samples (%s)\n", fit.termset.name().c_str(), fit.n_samples,
                  a.scenarios ? "Table 2 scenarios" : "loss x delay grid");
      for (std::size_t k = 0; k < fit.termset.size(); ++k) {
        out << strf("  %-7s %14.6g\n", fit.termset.term_label(k).c_str(), fit.coefficients(static_cast<Eigen::Index>(k)));
      }
      out << strf("r_squared %.4f\nrmse      %.4f\n", fit.r_squared, fit.rmse);
      out << strf("max |fit - built-in bias| over samples: %.4f R\n", max_delta);
      if (!a.output.empty()) out << "profile fragment written to " << a.output << '\n';
      break;
  }
  return kExitOk;
}

// fit ----------------------------------------------------------------------

struct FitArgs {
  std::string input;
  std::string termsets = "poly23";
  std::string denominator = "n-p";
};

std::vector<Sample> load_samples(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<Sample> samples;
  std::vector<ValidationError::Issue> issues;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!header) {
      header = true;
      continue;
    }
    Sample s;
    char extra = 0;
    if (std::sscanf(line.c_str(), " %lf , %lf , %lf %c", &s.x, &s.y, &s.value, &extra) != 3 || !std::isfinite(s.x) ||
        !std::isfinite(s.y) || !std::isfinite(s.value)) {
      issues.push_back({line_no, "expected three finite numbers x,y,value"});
      continue;
    }
    samples.push_back(s);
  }
  if (!header) throw ValidationError({{1, "missing header row"}});
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return samples;
}

int cmd_fit(const CliConfig& cfg, const FitArgs& a, std::istream& in, std::ostream& out) {
  std::vector<Sample> samples;
  if (a.input == "-") {
    samples = load_samples(in);
  } else {
    std::ifstream file(a.input);
    if (!file) throw DataError("cannot open '" + a.input + "'");
    samples = load_samples(file);
  }
  std::vector<TermSet> candidates;
  std::stringstream ss(a.termsets);
  std::string name;
  while (std::getline(ss, name, ',')) candidates.push_back(TermSet::from_name(name));
  if (candidates.empty()) throw UsageError("no term sets given");
  const auto ranked = select_termset(samples, candidates, parse_denominator(a.denominator));

  switch (cfg.output()) {
    case Format::json: {
      nlohmann::json doc = nlohmann::json::array();
      for (const auto& fit : ranked) doc.push_back(fit_to_json(fit));
      out << doc.dump() << '\n';
      break;
    }
    case Format::csv:
      out << "rank,termset,term,coefficient,r_squared,rmse\n";
      for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& fit = ranked[i];
        for (std::size_t k = 0; k < fit.termset.size(); ++k) {
          out << i + 1 << ',' << fit.termset.name() << ',' << fit.termset.term_label(k) << ','
              << num(fit.coefficients(static_cast<Eigen::Index>(k))) << ',' << num(fit.r_squared) << ','
              << num(fit.rmse) << '\n';
        }
      }
      break;
    case Format::table:
      for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& fit = ranked[i];
        out << strf("#%zu %s  r_squared %.6f  rmse %.6g  n %zu\n", i + 1, fit.termset.name().c_str(), fit.r_squared,
                    fit.rmse, fit.n_samples);
        for (std::size_t k = 0; k < fit.termset.size(); ++k) {
          out << strf("  %-7s %16.9g\n", fit.termset.term_label(k).c_str(),
                      fit.coefficients(static_cast<Eigen::Index>(k)));
        }
      }
      break;
  }
  return kExitOk;
}

// evaluate -----------------------------------------------------------------

struct EvaluateArgs {
  bool embedded = false;
  std::string records;
  std::string models = "simplified,enhanced";
  std::string mode = "scenario-mean";
};

int cmd_evaluate(const CliConfig& cfg, const EvaluateArgs& a, std::ostream& out) {
  if (a.embedded == !a.records.empty()) throw UsageError("give exactly one of --embedded or --records");
  const auto profile = resolve_profile(cfg);
  const auto models = parse_models(a.models);

  EvaluationOptions options;
  if (a.mode == "per-record") {
    options.mode = EvaluationMode::per_record;
  } else if (a.mode == "per-record-bounds") {
    options.per_record_bounds = true;
  } else if (a.mode != "scenario-mean") {
    throw UsageError("--mode must be scenario-mean, per-record or per-record-bounds");
  }

  std::vector<TestSet> testsets;
  std::string source;
  if (a.embedded) {
    if (options.mode == EvaluationMode::per_record) {
      testsets = group_into_testsets(embedded::table5_expanded_records());
      source = "embedded Table 5, expanded to synthetic per-record votes";
    } else {
      testsets = embedded::table5_testsets();
      source = "embedded Table 5 aggregates";
    }
  } else {
    std::ifstream file(a.records);
    if (!file) throw DataError("cannot open '" + a.records + "'");
    testsets = group_into_testsets(load_subjective_records(file));
    source = a.records;
  }

  const auto report = evaluate_models(testsets, models, profile, SubjectiveSurface::g729_thai(), options);
  const std::string mode_label =
      std::string(to_string(report.mode)) + (options.per_record_bounds ? " with per-record bounds" : "");

  if (cfg.output() == Format::json) {
    nlohmann::json doc = {{"mode", mode_label}, {"source", source}, {"codec", profile.name}};
    doc["test_sets"] = nlohmann::json::array();
    for (const auto& ts : report.test_sets) {
      nlohmann::json t = {{"id", ts.test_set}, {"records", ts.record_count}};
      for (const auto& m : ts.models) {
        nlohmann::json cell = {{"mape", m.mape}, {"band", m.band}};
        if (m.per_record_bounds) {
          cell["per_record_bounds"] = {{"low", m.per_record_bounds->low},
                                       {"high", m.per_record_bounds->high},
                                       {"irreproducible_cells", m.per_record_bounds->irreproducible_cells}};
        }
        t["models"][std::string(to_string(m.model))] = cell;
      }
      doc["test_sets"].push_back(t);
    }
    for (const auto& [m, v] : report.average_mape) {
      doc["average_mape"][std::string(to_string(m))] = {{"mape", v}, {"band", std::string(mape_band(v))}};
    }
    if (report.error_reduction_percent) doc["error_reduction_percent"] = *report.error_reduction_percent;
    out << doc.dump() << '\n';
    return kExitOk;
  }

  if (cfg.output() == Format::csv) {
    out << "test_set,records,model,mape,band,bound_low,bound_high\n";
    for (const auto& ts : report.test_sets) {
      for (const auto& m : ts.models) {
        out << ts.test_set << ',' << ts.record_count << ',' << to_string(m.model) << ',' << num(m.mape) << ','
            << m.band << ',' << (m.per_record_bounds ? num(m.per_record_bounds->low) : "") << ','
            << (m.per_record_bounds ? num(m.per_record_bounds->high) : "") << '\n';
      }
    }
    for (const auto& [m, v] : report.average_mape) {
      out << "average,," << to_string(m) << ',' << num(v) << ',' << mape_band(v) << ",,\n";
    }
    if (report.error_reduction_percent) out << "error_reduction,,,," << num(*report.error_reduction_percent) << ",,\n";
    return kExitOk;
  }

  out << "mode: " << mode_label << "\nsource: " << source << '\n';
  for (const auto& ts : report.test_sets) {
    out << strf("%-6s records %-4zu", ts.test_set.c_str(), ts.record_count);
    for (const auto& m : ts.models) {
      out << strf("  %s %6.2f %% (%s)", to_string(m.model).data(), m.mape, m.band.c_str());
      if (m.per_record_bounds) out << strf(" per-record [%.2f, %.2f]", m.per_record_bounds->low, m.per_record_bounds->high);
    }
    out << '\n';
  }
  for (const auto& [m, v] : report.average_mape) {
    out << strf("average %-11s %6.2f %% (%s)\n", to_string(m).data(), v, mape_band(v).data());
  }
  if (report.error_reduction_percent) out << strf("error reduction %.2f %%\n", *report.error_reduction_percent);
  if (a.embedded) {
    out << strf("published: simplified %.2f %%, enhanced %.2f %%, reduction %.2f %% (per-record on raw votes)\n",
                embedded::kTable7SimplifiedAverage, embedded::kTable7EnhancedAverage, embedded::kTable7ErrorReduction);
  }
  return kExitOk;
}

// monitor ------------------------------------------------------------------

struct MonitorArgs {
  std::string input = "-";
  std::size_t window_count = 10;
  double window_seconds = 0.0;
  std::string on_error = "continue";
  std::string stream;
};

void emit_window(std::ostream& out, Format format, const MonitorWindow& w, bool& header_done) {
  switch (format) {
    case Format::json: {
      nlohmann::json j = {{"window", w.index},
                          {"first_ts", w.first_ts},
                          {"last_ts", w.last_ts},
                          {"records", w.records},
                          {"errors", w.errors},
                          {"loss_percent", w.mean_loss_percent},
                          {"delay_ms", w.mean_delay_ms},
                          {"r_simplified", w.simplified.r_value},
                          {"mos_simplified", w.simplified.mos},
                          {"r_enhanced", w.enhanced.r_value},
                          {"mos_enhanced", w.enhanced.mos},
                          {"extrapolated", w.enhanced.extrapolated}};
      out << j.dump() << '\n';
      break;
    }
    case Format::csv:
      if (!header_done) {
        out << "window,first_ts,last_ts,records,errors,loss_percent,delay_ms,mos_simplified,mos_enhanced,"
               "extrapolated\n";
        header_done = true;
      }
      out << w.index << ',' << w.first_ts << ',' << w.last_ts << ',' << w.records << ',' << w.errors << ','
          << num(w.mean_loss_percent) << ',' << num(w.mean_delay_ms) << ',' << num(w.simplified.mos) << ','
          << num(w.enhanced.mos) << ',' << (w.enhanced.extrapolated ? "true" : "false") << '\n';
      break;
    case Format::table:
      out << strf("window %zu  n=%zu  loss %.3f %%  delay %.1f ms  MOS simplified %.3f  enhanced %.3f%s\n", w.index,
                  w.records, w.mean_loss_percent, w.mean_delay_ms, w.simplified.mos, w.enhanced.mos,
                  w.enhanced.extrapolated ? "  (extrapolated)" : "");
      break;
  }
  out.flush();
}

int cmd_monitor(const CliConfig& cfg, const MonitorArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
  if (a.on_error != "continue" && a.on_error != "abort") throw UsageError("--on-error must be continue or abort");
  if (a.window_count == 0) throw UsageError("--window-count must be positive");
  if (a.window_seconds < 0.0) throw UsageError("--window-seconds must be positive");
  auto profile = resolve_profile(cfg);
  if (!profile.bias) throw ConfigError("monitor needs a codec profile with a bias polynomial");

  std::ifstream file;
  std::istream* source = &in;
  if (a.input != "-") {
    file.open(a.input);
    if (!file) throw DataError("cannot open '" + a.input + "'");
    source = &file;
  }

  WindowPolicy policy;
  policy.count = a.window_count;
  if (a.window_seconds > 0.0) policy.seconds = a.window_seconds;
  WindowAggregator aggregator(policy, profile);
  MetricStreamReader reader(*source,
                            a.on_error == "abort" ? StreamErrorPolicy::abort : StreamErrorPolicy::skip_and_report);
  bool header_done = false;
  while (auto item = reader.next()) {
    if (const auto* bad = std::get_if<MetricLineError>(&*item)) {
      err << "line " << bad->line << ": " << bad->message << '\n';
      aggregator.note_error();
      continue;
    }
    const auto& record = std::get<MetricRecord>(*item);
    if (!a.stream.empty() && record.stream_id.value_or("") != a.stream) continue;
    if (auto w = aggregator.push(record)) emit_window(out, cfg.output(), *w, header_done);
  }
  if (auto w = aggregator.finish()) emit_window(out, cfg.output(), *w, header_done);
  return kExitOk;
}

// reproduce ----------------------------------------------------------------

int cmd_reproduce(const CliConfig& cfg, const std::string& target, std::ostream& out) {
  const auto r = reproduce(target);
  if (cfg.output() == Format::json) {
    out << r.to_json().dump() << '\n';
  } else {
    out << r.rendered;
    if (!r.rendered.empty() && r.rendered.back() != '\n') out << '\n';
    for (const auto& c : r.checks) {
      out << (c.pass ? "PASS " : "FAIL ") << c.label << strf(": %.4f (accepted [%.4f, %.4f])\n", c.computed, c.low, c.high);
    }
    out << target << ": " << (r.pass() ? "PASS" : "MISMATCH") << '\n';
  }
  return r.pass() ? kExitOk : kExitMismatch;
}

// export-records -----------------------------------------------------------

int cmd_export_records(const std::string& output, std::ostream& out) {
  const auto records = embedded::table5_expanded_records();
  if (output.empty() || output == "-") {
    write_subjective_records(out, records);
  } else {
    std::ofstream file(output);
    if (!file) throw DataError("cannot write '" + output + "'");
    write_subjective_records(file, records);
  }
  return kExitOk;
}

}  // namespace

std::vector<double> parse_axis(const std::string& text) {
  auto number = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
      throw UsageError("'" + s + "' in axis '" + text + "' is not a number");
    }
    return v;
  };
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("range '" + text + "' must be start:stop[:step]");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double step = parts.size() == 3 ? number(parts[2]) : 1.0;
    if (!(step > 0.0)) throw UsageError("range '" + text + "' needs a positive step");
    // Index-based to avoid drift; admit the endpoint within rounding.
    for (long k = 0;; ++k) {
      const double v = start + static_cast<double>(k) * step;
      if (v > stop + 1e-9 * std::max(1.0, std::abs(stop))) break;
      values.push_back(v);
    }
  } else {
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ',')) {
      if (!p.empty()) values.push_back(number(p));
    }
  }
  if (values.empty()) throw UsageError("axis '" + text + "' is empty");
  return values;
}

std::vector<SweepRow> sweep(const std::vector<double>& loss_percent, const std::vector<double>& delay_ms,
                            const std::vector<ModelKind>& models, const CodecProfile& profile,
                            const SubjectiveSurface& surface, Extrapolation policy) {
  if (loss_percent.empty() || delay_ms.empty()) throw UsageError("sweep needs non-empty loss and delay axes");
  std::vector<SweepRow> rows;
  rows.reserve(loss_percent.size() * delay_ms.size());
  for (double d : delay_ms) {
    for (double p : loss_percent) {
      const NetworkCondition cond(p, d);
      SweepRow row;
      row.loss_percent = p;
      row.delay_ms = d;
      row.extrapolated = !cond.in_domain();
      for (ModelKind m : models) row.estimates[m] = estimate(m, cond, profile, surface, policy);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

WindowAggregator::WindowAggregator(WindowPolicy policy, CodecProfile profile)
    : policy_(policy), profile_(std::move(profile)) {}

std::optional<MonitorWindow> WindowAggregator::push(const MetricRecord& record) {
  std::optional<MonitorWindow> closed;
  if (policy_.seconds) {
    if (!origin_) origin_ = record.seconds;
    const double w = *policy_.seconds;
    const auto slot = static_cast<std::size_t>(std::max(0.0, std::floor((record.seconds - *origin_) / w)));
    if (count_ > 0 && record.seconds >= window_start_ + w) closed = close();
    if (count_ == 0) {
      next_index_ = std::max(next_index_, slot);
      window_start_ = *origin_ + static_cast<double>(next_index_) * w;
    }
  }
  if (count_ == 0) first_ts_ = record.ts;
  last_ts_ = record.ts;
  loss_sum_ += record.loss_percent;
  delay_sum_ += record.delay_ms;
  ++count_;
  if (!policy_.seconds && count_ >= policy_.count) {
    return close();
  }
  return closed;
}

std::optional<MonitorWindow> WindowAggregator::finish() { return close(); }

std::optional<MonitorWindow> WindowAggregator::close() {
  if (count_ == 0) return std::nullopt;
  MonitorWindow w;
  w.index = next_index_++;
  w.first_ts = first_ts_;
  w.last_ts = last_ts_;
  w.records = count_;
  w.errors = pending_errors_;
  w.mean_loss_percent = loss_sum_ / static_cast<double>(count_);
  w.mean_delay_ms = delay_sum_ / static_cast<double>(count_);
  const NetworkCondition cond(w.mean_loss_percent, w.mean_delay_ms);
  w.simplified = simplified_estimate(cond, profile_, Extrapolation::allow);
  w.enhanced = enhanced_estimate(cond, profile_, Extrapolation::allow);
  count_ = 0;
  pending_errors_ = 0;
  loss_sum_ = 0.0;
  delay_sum_ = 0.0;
  return w;
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"VoIP quality estimation with the simplified and bias-enhanced E-model"};
  app.name(args.empty() ? "voipqoe" : args.front());
  app.require_subcommand(1);

  CliConfig cfg;
  PredictArgs predict;
  SweepArgs sweep_args;
  DeriveArgs derive;
  FitArgs fit;
  EvaluateArgs evaluate;
  MonitorArgs monitor;
  std::string target;
  std::string export_path;

  auto* p = app.add_subcommand("predict", "Estimate R and MOS for one loss/delay condition");
  add_common(p, cfg);
  p->add_option("--loss", predict.loss, "Packet loss in percent")->required();
  p->add_option("--delay", predict.delay, "One-way delay in milliseconds")->required();
  p->add_option("--model", predict.model, "simplified | enhanced | subjective")->capture_default_str();

  auto* s = app.add_subcommand("sweep", "Tabulate all models over a loss range and delay list");
  add_common(s, cfg);
  s->add_option("--loss", sweep_args.loss, "Loss axis, start:stop[:step] or a,b,c")->required();
  s->add_option("--delay", sweep_args.delay, "Delay axis, start:stop[:step] or a,b,c")->capture_default_str();
  s->add_option("--models", sweep_args.models, "Comma-separated models")->capture_default_str();

  auto* d = app.add_subcommand("derive-bias", "Fit the bias surface from the subjective and simplified models");
  add_common(d, cfg);
  d->add_option("--grid-loss", derive.grid_loss, "Loss grid")->capture_default_str();
  d->add_option("--grid-delay", derive.grid_delay, "Delay grid")->capture_default_str();
  d->add_option("--termset", derive.termset, "poly31 | poly23 | poly32 | poly33")->capture_default_str();
  d->add_option("--rmse-denominator", derive.denominator, "n-p | n")->capture_default_str();
  d->add_option("--output", derive.output, "Write a JSON profile fragment here");
  d->add_flag("--scenarios", derive.scenarios, "Fit on the nine conversation-test scenarios instead of the grid");

  auto* f = app.add_subcommand("fit", "Least-squares surface fit of x,y,value samples");
  add_common(f, cfg);
  f->add_option("--input", fit.input, "CSV with header x,y,value ('-' for stdin)")->required();
  f->add_option("--termset", fit.termsets, "Comma-separated candidates, ranked by rmse")->capture_default_str();
  f->add_option("--rmse-denominator", fit.denominator, "n-p | n")->capture_default_str();

  auto* e = app.add_subcommand("evaluate", "MAPE of the models against subjective scores");
  add_common(e, cfg);
  e->add_flag("--embedded", evaluate.embedded, "Use the built-in Table 5 test sets");
  e->add_option("--records", evaluate.records, "Subjective records CSV");
  e->add_option("--models", evaluate.models, "Comma-separated models")->capture_default_str();
  e->add_option("--mode", evaluate.mode, "scenario-mean | per-record | per-record-bounds")->capture_default_str();

  auto* m = app.add_subcommand("monitor", "Score a line-delimited JSON metric stream in tumbling windows");
  add_common(m, cfg);
  m->add_option("--input", monitor.input, "Metric stream path ('-' for stdin)")->capture_default_str();
  m->add_option("--window-count", monitor.window_count, "Records per window")->capture_default_str();
  m->add_option("--window-seconds", monitor.window_seconds, "Window duration; overrides --window-count");
  m->add_option("--on-error", monitor.on_error, "continue | abort")->capture_default_str();
  m->add_option("--stream", monitor.stream, "Only score records with this stream_id");

  auto* r = app.add_subcommand("reproduce", "Recompute a published table or figure and diff it");
  add_common(r, cfg);
  r->add_option("target", target, "table3 | table4 | table6 | table7 | fig6")
      ->required()
      ->check(CLI::IsMember(reproduction_targets()));

  auto* x = app.add_subcommand("export-records", "Write the synthetic per-record expansion of Table 5 as CSV");
  x->add_option("--output", export_path, "Destination ('-' for stdout)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("voipqoe");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    // Subcommand help is raised as CallForHelp from the subcommand itself.
    if (ex.get_exit_code() == 0) {
      out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return kExitOk;
    }
    err << "usage error: " << ex.what() << '\n';
    return kExitUsage;
  }

  try {
    if (p->parsed()) return cmd_predict(cfg, predict, out);
    if (s->parsed()) return cmd_sweep(cfg, sweep_args, out);
    if (d->parsed()) return cmd_derive_bias(cfg, derive, out);
    if (f->parsed()) return cmd_fit(cfg, fit, in, out);
    if (e->parsed()) return cmd_evaluate(cfg, evaluate, out);
    if (m->parsed()) return cmd_monitor(cfg, monitor, in, out, err);
    if (r->parsed()) return cmd_reproduce(cfg, target, out);
    if (x->parsed()) return cmd_export_records(export_path, out);
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& ex) {
    err << "domain error: " << ex.what() << '\n';
    return kExitDomain;
  } catch (const FitError& ex) {
    err << "fit error: " << ex.what() << '\n';
    return kExitDomain;
  } catch (const ConfigError& ex) {
    err << "configuration error: " << ex.what() << '\n';
    return kExitData;
  } catch (const DataError& ex) {
    err << "data error: " << ex.what() << '\n';
    return kExitData;
  }
  err << "usage error: no subcommand\n";
  return kExitUsage;
}

}  // namespace voipqoe
