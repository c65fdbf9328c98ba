#include "emodec/trace_io.hpp"

#include <cmath>

#include <json.hpp>

#include "emodec/circumplex.hpp"
#include "emodec/error.hpp"
#include "emodec/io_util.hpp"

namespace emodec {

std::vector<TraceRecord> to_records(const EmotionTrace& trace, bool smoothed) {
  std::vector<TraceRecord> out;
  out.reserve(trace.size());
  for (const auto& p : trace.points) out.push_back({p, std::string(nearest_emotion_word(p)), smoothed});
  return out;
}

std::string records_jsonl(const std::vector<TraceRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["t"] = r.point.t;
    j["valence"] = r.point.valence;
    j["arousal"] = r.point.arousal;
    j["word"] = r.word;
    j["smoothed"] = r.smoothed;
    out += j.dump() + '\n';
  }
  return out;
}

std::string records_csv(const std::vector<TraceRecord>& records) {
  std::string out = "t,valence,arousal,word,smoothed\n";
  for (const auto& r : records) {
    out += format_double(r.point.t) + ',' + format_double(r.point.valence) + ',' + format_double(r.point.arousal) +
           ',' + r.word + ',' + (r.smoothed ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<TraceRecord> parse_records_jsonl(std::string_view text, std::string_view source_name) {
  std::vector<TraceRecord> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TraceRecord r;
      r.point.t = j.at("t").get<double>();
      r.point.valence = j.at("valence").get<double>();
      r.point.arousal = j.at("arousal").get<double>();
      r.word = j.contains("word") ? j["word"].get<std::string>() : std::string(nearest_emotion_word(r.point));
      r.smoothed = j.value("smoothed", false);
      if (!std::isfinite(r.point.t) || !std::isfinite(r.point.valence) || !std::isfinite(r.point.arousal)) {
        throw SchemaError("non-finite trace value", line_no);
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string(source_name) + ": " + e.what(), line_no);
    }
  }
  return out;
}

std::vector<TraceRecord> load_records_jsonl(const std::filesystem::path& path) {
  return parse_records_jsonl(read_text_file(path), path.string());
}

EmotionTrace raw_trace(const std::vector<TraceRecord>& records, std::string source_id) {
  EmotionTrace trace;
  trace.source_id = std::move(source_id);
  for (const auto& r : records) {
    if (r.smoothed) continue;
    if (!trace.points.empty() && !(r.point.t > trace.points.back().t)) {
      throw SchemaError("trace timestamps must be strictly increasing");
    }
    trace.points.push_back(r.point);
  }
  return trace;
}

}  // namespace emodec
