#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "emodec/emotion.hpp"

namespace emodec {

struct SmoothingSpec {
  double render_rate = 30.0;  ///< rendered points per second
  double half_life = 0.35;    ///< seconds for the gap to the target to halve

  void validate() const;
};

/// Exponential interpolation between raw predictions on a fixed render grid
/// t_i = t_0 + i / render_rate. At each grid step the rendered value moves toward
/// the most recent raw point at or before t_i:
///   r <- p + (r - p) * 2^(-dt / half_life)
/// Feeding raw points one at a time releases every grid point up to and including
/// the new point's time, so live and offline smoothing agree.
class ExponentialSmoother {
 public:
  explicit ExponentialSmoother(SmoothingSpec spec);

  /// Raw points must arrive with strictly increasing t.
  std::vector<EmotionPoint> feed(const EmotionPoint& raw);

 private:
  SmoothingSpec spec_;
  double decay_;
  std::optional<EmotionPoint> first_;
  EmotionPoint target_{};
  EmotionPoint rendered_{};
  std::size_t next_index_ = 0;
};

/// Offline smoothing over [first.t, last.t]; the input must be non-empty.
EmotionTrace smooth(const EmotionTrace& trace, const SmoothingSpec& spec = {});

}  // namespace emodec
