#include "emodec/stream_message.hpp"

#include <cmath>

#include <json.hpp>

#include "emodec/circumplex.hpp"
#include "emodec/error.hpp"

namespace emodec {

std::string_view to_string(StreamMessage::Kind kind) {
  switch (kind) {
    case StreamMessage::Kind::Point:
      return "point";
    case StreamMessage::Kind::Status:
      return "status";
    case StreamMessage::Kind::End:
      return "end";
  }
  return "unknown";
}

StreamMessage StreamMessage::make_point(const EmotionPoint& p) {
  StreamMessage m;
  m.kind = Kind::Point;
  m.point = p;
  m.word = std::string(nearest_emotion_word(p));
  return m;
}

StreamMessage StreamMessage::make_status(std::string state) {
  StreamMessage m;
  m.kind = Kind::Status;
  m.state = std::move(state);
  return m;
}

StreamMessage StreamMessage::make_end() {
  StreamMessage m;
  m.kind = Kind::End;
  return m;
}

std::string StreamMessage::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = to_string(kind);
  switch (kind) {
    case Kind::Point:
      j["t"] = point.t;
      j["valence"] = point.valence;
      j["arousal"] = point.arousal;
      j["word"] = word;
      break;
    case Kind::Status:
      j["state"] = state;
      break;
    case Kind::End:
      break;
  }
  j["schema"] = kWireSchemaVersion;
  return j.dump();
}

StreamMessage StreamMessage::parse(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("malformed frame: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw SchemaError("frame without kind");
  const auto kind = j["kind"].get<std::string>();
  StreamMessage m;
  try {
    if (kind == "point") {
      m.kind = Kind::Point;
      m.point.t = j.at("t").get<double>();
      m.point.valence = j.at("valence").get<double>();
      m.point.arousal = j.at("arousal").get<double>();
      m.word = j.at("word").get<std::string>();
      if (!std::isfinite(m.point.t) || std::abs(m.point.valence) > 1.0 || std::abs(m.point.arousal) > 1.0) {
        throw SchemaError("point frame out of range");
      }
    } else if (kind == "status") {
      m.kind = Kind::Status;
      m.state = j.at("state").get<std::string>();
    } else if (kind == "end") {
      m.kind = Kind::End;
    } else {
      throw SchemaError("unknown frame kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed frame: ") + e.what());
  }
  return m;
}

}  // namespace emodec
