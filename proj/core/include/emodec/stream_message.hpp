#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "emodec/emotion.hpp"

namespace emodec {

/// Version of the frame layout; sent as the "schema" field of every frame.
inline constexpr int kWireSchemaVersion = 1;

/// One frame on the /stream socket:
///   {"kind":"point","t":..,"valence":..,"arousal":..,"word":"..","schema":1}
///   {"kind":"status","state":"..","schema":1}
///   {"kind":"end","schema":1}
struct StreamMessage {
  enum class Kind : std::uint8_t { Point, Status, End };

  Kind kind = Kind::Point;
  EmotionPoint point;
  std::string word;
  std::string state;

  static StreamMessage make_point(const EmotionPoint& p);  ///< word from the circumplex lookup
  static StreamMessage make_status(std::string state);
  static StreamMessage make_end();

  std::string to_json() const;
  /// Throws SchemaError on malformed frames.
  static StreamMessage parse(std::string_view text);
};

std::string_view to_string(StreamMessage::Kind kind);

}  // namespace emodec
