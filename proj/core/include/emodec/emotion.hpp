#pragma once

#include <string>
#include <vector>

namespace emodec {

/// One prediction on the valence/arousal plane, stamped with the end of its window.
struct EmotionPoint {
  double t = 0.0;
  double valence = 0.0;
  double arousal = 0.0;
};

/// Time-ordered predictions; t strictly increasing.
struct EmotionTrace {
  std::vector<EmotionPoint> points;
  std::string source_id;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

}  // namespace emodec
