#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "emodec/emotion.hpp"

namespace emodec {

/// One line of a trace file: {t, valence, arousal, word, smoothed}.
struct TraceRecord {
  EmotionPoint point;
  std::string word;
  bool smoothed = false;
};

/// Attaches the circumplex word to every point.
std::vector<TraceRecord> to_records(const EmotionTrace& trace, bool smoothed);

std::string records_jsonl(const std::vector<TraceRecord>& records);
std::string records_csv(const std::vector<TraceRecord>& records);

/// Parses line-delimited trace records; blank lines are skipped.
std::vector<TraceRecord> parse_records_jsonl(std::string_view text, std::string_view source_name = "<memory>");
std::vector<TraceRecord> load_records_jsonl(const std::filesystem::path& path);

/// Raw (unsmoothed) points of a record list as a trace.
EmotionTrace raw_trace(const std::vector<TraceRecord>& records, std::string source_id = {});

}  // namespace emodec
