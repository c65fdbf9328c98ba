#include "emodec/circumplex.hpp"

#include <cmath>
#include <numbers>

namespace emodec {

std::string_view nearest_emotion_word(const EmotionPoint& p) {
  if (std::hypot(p.valence, p.arousal) < kNeutralRadius) return kNeutralWord;
  double degrees = std::atan2(p.arousal, p.valence) * 180.0 / std::numbers::pi;
  if (degrees < 0.0) degrees += 360.0;
  // Sector k spans [45k - 22.5, 45k + 22.5); a boundary belongs to the sector above it.
  const auto sector = static_cast<std::size_t>(std::floor((degrees + 22.5) / 45.0)) % kCircumplexWords.size();
  return kCircumplexWords[sector].word;
}

}  // namespace emodec
