#pragma once

#include <array>
#include <string_view>

#include "emodec/emotion.hpp"

namespace emodec {

struct CircumplexWord {
  std::string_view word;
  double angle_degrees;
};

/// Eight-octant layout, valence on the horizontal axis, arousal vertical.
inline constexpr std::array<CircumplexWord, 8> kCircumplexWords = {{
    {"pleased", 0.0},
    {"excited", 45.0},
    {"aroused", 90.0},
    {"distressed", 135.0},
    {"miserable", 180.0},
    {"depressed", 225.0},
    {"sleepy", 270.0},
    {"content", 315.0},
}};

inline constexpr double kNeutralRadius = 0.1;
inline constexpr std::string_view kNeutralWord = "neutral";

/// Nearest word by angle; exact ties resolve counterclockwise. Points closer than
/// kNeutralRadius to the origin are "neutral".
std::string_view nearest_emotion_word(const EmotionPoint& p);

}  // namespace emodec
