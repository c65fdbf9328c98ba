#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "emodec/audio_io.hpp"
#include "emodec/circumplex.hpp"
#include "emodec/decoder.hpp"
#include "emodec/dsp.hpp"
#include "emodec/error.hpp"
#include "emodec/io_util.hpp"
#include "emodec/live.hpp"
#include "emodec/midlevel.hpp"
#include "emodec/regression.hpp"
#include "emodec/smoothing.hpp"
#include "emodec/stream_server.hpp"
#include "emodec/trace_io.hpp"

namespace emodec::cli {

namespace fs = std::filesystem;

std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

namespace {

/// Four significant digits for human-facing reports.
std::string sig4(double v) {
  std::ostringstream ss;
  ss << std::setprecision(4) << std::showpoint << v;
  std::string s = ss.str();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string lpad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw IoError("no such file: " + path);
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

// ---------------------------------------------------------------------------

struct FeaturesArgs {
  std::string audio;
  std::string out_dir;
  double window = 5.0;
  double hop = 1.0;
};

int cmd_features(const FeaturesArgs& a, std::ostream& out) {
  require_file(a.audio);
  const WindowSpec spec{a.window, a.hop};
  spec.validate();
  const DspConfig dsp;
  const auto audio = load_audio(a.audio);

  const auto rms = rms_trace(audio, dsp.rms);
  const auto onsets = detect_onsets(audio.view(), audio.sample_rate, dsp.onsets);

  std::string windows = "t_start,t_end,onset_density,mean_rms\n";
  const std::size_t w = spec.window_samples(audio.sample_rate);
  const std::size_t h = spec.hop_samples(audio.sample_rate);
  const std::size_t count = spec.window_count(audio.size(), audio.sample_rate);
  for (std::size_t k = 0; k < count; ++k) {
    const auto dyn = analyze_window(audio.view().subspan(k * h, w), audio.sample_rate, dsp);
    windows += format_double(static_cast<double>(k * h) / audio.sample_rate) + ',' +
               format_double(static_cast<double>(k * h + w) / audio.sample_rate) + ',' +
               format_double(dyn.onset_density) + ',' + format_double(dyn.mean_rms) + '\n';
  }

  const double duration = audio.duration_seconds();
  const double density = duration > 0.0 ? onset_density(onsets, 0.0, duration) : 0.0;
  const double level = duration > 0.0 ? mean_rms(rms, 0.0, duration) : 0.0;
  const std::string summary = "duration_s,onset_count,onset_density,mean_rms\n" + format_double(duration) + ',' +
                              std::to_string(onsets.size()) + ',' + format_double(density) + ',' +
                              format_double(level) + '\n';

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_file_atomic(dir / "rms.csv", rms_csv(rms));
  write_file_atomic(dir / "onsets.csv", onsets_csv(onsets));
  write_file_atomic(dir / "windows.csv", windows);
  write_file_atomic(dir / "summary.csv", summary);

  out << "duration      " << sig4(duration) << " s\n"
      << "onsets        " << onsets.size() << "\n"
      << "onset density " << sig4(density) << " /s\n"
      << "mean RMS      " << sig4(level) << "\n"
      << "windows       " << count << "\n"
      << "wrote " << (dir / "rms.csv").string() << ", onsets.csv, windows.csv, summary.csv\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string dataset;
  std::string features = "all";
  std::string out;
  bool table = false;
};

void print_table_header(std::ostream& out) {
  out << "Adjusted R^2 (in-sample)\n"
      << pad("Feature set", 34) << lpad("Arousal", 9) << lpad("Valence", 9) << "\n";
}

void print_table_row(std::ostream& out, const EmotionModel& m) {
  out << pad(feature_set_label(m.subset), 34) << lpad(sig4(m.arousal.adjusted_r2), 9)
      << lpad(sig4(m.valence.adjusted_r2), 9) << "\n";
}

int cmd_fit(const FitArgs& a, std::ostream& out) {
  require_file(a.dataset);
  const auto subset = parse_feature_subset(a.features);
  const auto ds = load_dataset(a.dataset);
  const auto model = fit_emotion_model(ds, subset);

  print_table_header(out);
  if (a.table) {
    for (const auto& s : {feature_sets::midlevel7(), feature_sets::new2(), feature_sets::all()}) {
      print_table_row(out, s == subset ? model : fit_emotion_model(ds, s));
    }
    if (subset != feature_sets::midlevel7() && subset != feature_sets::new2() && subset != feature_sets::all()) {
      print_table_row(out, model);
    }
  } else {
    print_table_row(out, model);
  }
  out << "n = " << ds.size() << ", p = " << model.p() << "\n";

  ensure_parent(a.out);
  save_model(model, a.out);
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string model;
  std::string out_dir;
};

void print_fit(std::ostream& out, const char* target, const EmotionModel& m, const OlsFit& fit) {
  out << target << ": R^2 " << sig4(fit.r2) << ", adjusted R^2 " << sig4(fit.adjusted_r2) << " (in-sample), n "
      << fit.n << ", p " << fit.p << "\n";
  out << "  " << pad("feature", 20) << lpad("weight", 12) << lpad("std.err", 12) << lpad("t", 12) << "\n";
  out << "  " << pad("(intercept)", 20) << lpad(sig4(fit.intercept), 12) << lpad(sig4(fit.intercept_standard_error), 12)
      << "\n";
  for (std::size_t j = 0; j < m.p(); ++j) {
    out << "  " << pad(m.feature_names[j], 20) << lpad(sig4(fit.weights[j]), 12)
        << lpad(sig4(fit.standard_errors[j]), 12) << lpad(sig4(fit.t_values[j]), 12) << "\n";
  }
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  require_file(a.model);
  const auto model = load_model(a.model);
  out << feature_set_label(model.subset) << " (features z-scored before fitting)\n";
  print_fit(out, "arousal", model, model.arousal);
  print_fit(out, "valence", model, model.valence);

  const auto report = importance_report(model);
  out << "T-value ranking\n";
  for (std::size_t i = 0; i < report.arousal.size(); ++i) {
    out << "  " << pad(report.arousal[i].feature, 20) << lpad(sig4(report.arousal[i].t_value), 10) << "    "
        << pad(report.valence[i].feature, 20) << lpad(sig4(report.valence[i].t_value), 10) << "\n";
  }
  if (!a.out_dir.empty()) {
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    write_file_atomic(dir / "importance.csv", importance_csv(report));
    write_file_atomic(dir / "importance.svg", importance_svg(report));
    out << "wrote " << (dir / "importance.csv").string() << ", importance.svg\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct DecodeArgs {
  std::string audio;
  std::string model;
  std::string provider;
  bool static_mode = false;
  bool dynamic_mode = false;
  std::string out;
  std::string csv;
  bool smooth = false;
  double half_life = 0.35;
  double render_rate = 30.0;
  double window = 5.0;
  double hop = 1.0;
  unsigned threads = 1;
};

int cmd_decode(const DecodeArgs& a, std::ostream& out) {
  require_file(a.audio);
  require_file(a.model);
  const SmoothingSpec smoothing{a.render_rate, a.half_life};
  smoothing.validate();
  const auto provider = make_provider(a.provider);
  const auto model = load_model(a.model);
  const auto audio = load_audio(a.audio);

  std::vector<TraceRecord> records;
  if (a.static_mode) {
    const auto p = static_decode(audio, model, *provider);
    records.push_back({p, std::string(nearest_emotion_word(p)), false});
    out << "static: valence " << sig4(p.valence) << ", arousal " << sig4(p.arousal) << " -> " << records.back().word
        << "\n";
  } else {
    const WindowSpec spec{a.window, a.hop};
    spec.validate();
    DecodeOptions options;
    options.threads = std::max(1u, a.threads);
    auto trace = dynamic_decode(audio, model, *provider, spec, options);
    trace.source_id = fs::path(a.audio).filename().string();
    records = to_records(trace, false);
    if (a.smooth && !trace.empty()) {
      const auto smoothed = to_records(smooth(trace, smoothing), true);
      records.insert(records.end(), smoothed.begin(), smoothed.end());
    }
    out << "dynamic: " << trace.size() << " points";
    if (!trace.empty()) {
      out << ", last valence " << sig4(trace.points.back().valence) << ", arousal "
          << sig4(trace.points.back().arousal);
    }
    out << "\n";
  }

  ensure_parent(a.out);
  write_file_atomic(a.out, records_jsonl(records));
  if (!a.csv.empty()) {
    ensure_parent(a.csv);
    write_file_atomic(a.csv, records_csv(records));
  }
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct StreamArgs {
  std::string audio;
  std::string trace;
  std::string model;
  std::string provider;
  std::string address = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  double speed = 1.0;
  double chunk = 0.1;
  std::size_t wait_clients = 0;
  double wait_timeout = 30.0;
  double linger = 0.0;
  bool smooth = false;
  double half_life = 0.35;
  double render_rate = 30.0;
};

int cmd_stream(const StreamArgs& a, std::ostream& out) {
  auto& interrupted = interrupt_flag();
  const bool live = !a.audio.empty();
  if (live) {
    require_file(a.audio);
    require_file(a.model);
    if (a.provider.empty()) throw InvalidArgument("--provider is required with --audio");
  } else {
    require_file(a.trace);
  }
  if (a.port < 0 || a.port > 65535) throw InvalidArgument("--port must be in [0, 65535]");
  if (!(a.speed > 0.0)) throw InvalidArgument("--speed must be positive");
  if (!(a.chunk > 0.0)) throw InvalidArgument("--chunk must be positive");
  const SmoothingSpec smoothing{a.render_rate, a.half_life};
  smoothing.validate();

  // Load everything before the socket opens.
  std::optional<EmotionModel> model;
  std::shared_ptr<const MidLevelProvider> provider;
  std::optional<AudioBuffer> audio;
  EmotionTrace replay;
  if (live) {
    model = load_model(a.model);
    provider = make_provider(a.provider);
    audio = load_audio(a.audio);
  } else {
    replay = raw_trace(load_records_jsonl(a.trace), a.trace);
  }

  ServerOptions options;
  options.address = a.address;
  options.port = static_cast<std::uint16_t>(a.port);
  options.static_dir = a.static_dir;
  StreamServer server(options);
  server.start();
  out << "listening on http://" << a.address << ":" << server.port() << " (/stream, /status)" << std::endl;

  if (a.wait_clients > 0) {
    const auto timeout = std::chrono::milliseconds(static_cast<long long>(a.wait_timeout * 1000.0));
    if (!server.wait_for_clients(a.wait_clients, timeout)) {
      out << "warning: only " << server.client_count() << " of " << a.wait_clients << " clients connected" << std::endl;
    }
  }

  std::size_t published = 0;
  std::optional<ExponentialSmoother> smoother;
  if (a.smooth) smoother.emplace(smoothing);
  auto emit = [&](const EmotionPoint& p) {
    if (smoother) {
      for (const auto& r : smoother->feed(p)) server.publish_point(r);
    } else {
      server.publish_point(p);
    }
    ++published;
  };

  if (live) {
    const auto chunk = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(a.chunk * audio->sample_rate)));
    PacedSource source(std::move(*audio), chunk, Pacing::RealTime, a.speed);
    LiveDecodeSession session(std::move(source), *model, *provider);
    session.add_sink(emit);
    std::atomic<bool> done{false};
    std::thread watcher([&] {
      while (!done.load()) {
        if (interrupted.load()) {
          session.stop();
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
      }
    });
    server.set_state("decoding");
    const auto stats = session.run();
    done.store(true);
    watcher.join();
    out << "decoded " << stats.points << " windows, median analysis " << sig4(stats.median_latency_ms()) << " ms"
        << std::endl;
  } else {
    server.set_state("replaying");
    const auto start = std::chrono::steady_clock::now();
    for (const auto& p : replay.points) {
      const auto due = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                   std::chrono::duration<double>(p.t / a.speed));
      while (!interrupted.load() && std::chrono::steady_clock::now() < due) {
        std::this_thread::sleep_until(std::min(due, std::chrono::steady_clock::now() + std::chrono::milliseconds(20)));
      }
      if (interrupted.load()) break;
      emit(p);
    }
  }

  server.finish();
  server.drain(std::chrono::seconds(2));
  const auto linger_until =
      std::chrono::steady_clock::now() + std::chrono::milliseconds(static_cast<long long>(a.linger * 1000.0));
  while (!interrupted.load() && std::chrono::steady_clock::now() < linger_until) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  server.stop();
  out << (interrupted.load() ? "interrupted; " : "") << "sent " << published << " points, end" << std::endl;
  return kExitOk;
}

void add_smoothing_flags(CLI::App* cmd, double& half_life, double& render_rate) {
  cmd->add_option("--half-life", half_life, "Smoothing half-life in seconds")->capture_default_str();
  cmd->add_option("--render-rate", render_rate, "Smoothed points per second")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Music emotion decoding: features, regression, offline and live decoding", "emodecode"};
  app.set_config("--config", "", "Config file (TOML/INI) mirroring the flags; flags win");
  app.require_subcommand(1);

  FeaturesArgs features;
  auto* c_features = app.add_subcommand("features", "Extract RMS, onsets and per-window onset density / mean RMS");
  c_features->add_option("--audio", features.audio, "Input WAV file")->required();
  c_features->add_option("--out", features.out_dir, "Output directory for the CSV files")->required();
  c_features->add_option("--window", features.window, "Window length in seconds")->capture_default_str();
  c_features->add_option("--hop", features.hop, "Hop length in seconds")->capture_default_str();

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Fit the valence/arousal regression on a feature dataset");
  c_fit->add_option("--dataset", fit.dataset, "Dataset CSV")->required();
  c_fit->add_option("--features", fit.features, "all | midlevel7 | new2 | comma-separated feature names")
      ->capture_default_str();
  c_fit->add_option("--out", fit.out, "Model file to write")->required();
  c_fit->add_flag("--table", fit.table, "Also fit and report the (7), (2) and (9) feature sets");

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "Report fit diagnostics and T-value feature importance");
  c_analyze->add_option("--model", analyze.model, "Model file")->required();
  c_analyze->add_option("--out-dir", analyze.out_dir, "Directory for importance.csv and importance.svg");

  DecodeArgs decode;
  auto* c_decode = app.add_subcommand("decode", "Decode emotion from an audio file");
  c_decode->add_option("--audio", decode.audio, "Input WAV file")->required();
  c_decode->add_option("--model", decode.model, "Model file")->required();
  c_decode->add_option("--provider", decode.provider, "Mid-level provider: constant:<v1,...,v7> | trace:<csv>")
      ->required();
  auto* f_static = c_decode->add_flag("--static", decode.static_mode, "One prediction per clip (15 s windows)");
  auto* f_dynamic = c_decode->add_flag("--dynamic", decode.dynamic_mode, "Sliding-window trace (default)");
  f_static->excludes(f_dynamic);
  c_decode->add_option("--out", decode.out, "Trace output (JSON lines)")->required();
  c_decode->add_option("--csv", decode.csv, "Also write the trace as CSV");
  c_decode->add_flag("--smooth", decode.smooth, "Append exponentially smoothed records (smoothed=true)");
  add_smoothing_flags(c_decode, decode.half_life, decode.render_rate);
  c_decode->add_option("--window", decode.window, "Dynamic window length in seconds")->capture_default_str();
  c_decode->add_option("--hop", decode.hop, "Dynamic hop length in seconds")->capture_default_str();
  c_decode->add_option("--threads", decode.threads, "Worker threads for dynamic decoding")->capture_default_str();

  StreamArgs stream;
  auto* c_stream = app.add_subcommand("stream", "Serve live decoding or a recorded trace over WebSocket");
  auto* o_audio = c_stream->add_option("--audio", stream.audio, "Decode this WAV file live");
  auto* o_trace = c_stream->add_option("--trace", stream.trace, "Replay this trace file (JSON lines)");
  o_audio->excludes(o_trace);
  c_stream->add_option("--model", stream.model, "Model file (with --audio)")->needs(o_audio);
  c_stream->add_option("--provider", stream.provider, "Mid-level provider (with --audio)")->needs(o_audio);
  c_stream->add_option("--address", stream.address, "Listen address")->capture_default_str();
  c_stream->add_option("--port", stream.port, "Listen port (0 = ephemeral)")->capture_default_str();
  c_stream->add_option("--static-dir", stream.static_dir, "Serve UI assets from this directory");
  c_stream->add_option("--speed", stream.speed, "Playback speed factor")->capture_default_str();
  c_stream->add_option("--chunk", stream.chunk, "Live ingestion chunk in seconds")->capture_default_str();
  c_stream->add_option("--wait-clients", stream.wait_clients, "Wait for this many clients before starting")
      ->capture_default_str();
  c_stream->add_option("--wait-timeout", stream.wait_timeout, "Seconds to wait for clients")->capture_default_str();
  c_stream->add_option("--linger", stream.linger, "Seconds to keep serving after the end frame")
      ->capture_default_str();
  c_stream->add_flag("--smooth", stream.smooth, "Stream smoothed points at the render rate");
  add_smoothing_flags(c_stream, stream.half_life, stream.render_rate);

  std::vector<std::string> reversed;  // CLI11 consumes arguments from the back
  for (std::size_t i = args.size(); i > 1; --i) reversed.push_back(args[i - 1]);
  try {
    app.parse(reversed);
    if (c_stream->parsed() && stream.audio.empty() && stream.trace.empty()) {
      throw CLI::RequiredError("stream needs --audio or --trace");
    }
    if (c_stream->parsed() && !stream.audio.empty() && stream.model.empty()) {
      throw CLI::RequiredError("--model is required with --audio");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (c_features->parsed()) return cmd_features(features, out);
    if (c_fit->parsed()) return cmd_fit(fit, out);
    if (c_analyze->parsed()) return cmd_analyze(analyze, out);
    if (c_decode->parsed()) return cmd_decode(decode, out);
    if (c_stream->parsed()) return cmd_stream(stream, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace emodec::cli
