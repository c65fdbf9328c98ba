#include "emodec/smoothing.hpp"

#include <cmath>

#include "emodec/error.hpp"

namespace emodec {

namespace {
// Grid times within this distance of a raw timestamp count as "at" it.
constexpr double kTimeEpsilon = 1e-9;
}  // namespace

void SmoothingSpec::validate() const {
  if (!(render_rate > 0.0) || !std::isfinite(render_rate)) throw InvalidArgument("render_rate must be positive");
  if (!(half_life > 0.0) || !std::isfinite(half_life)) throw InvalidArgument("half_life must be positive");
}

ExponentialSmoother::ExponentialSmoother(SmoothingSpec spec)
    : spec_(spec), decay_((spec.validate(), std::exp2(-1.0 / (spec.render_rate * spec.half_life)))) {}

std::vector<EmotionPoint> ExponentialSmoother::feed(const EmotionPoint& raw) {
  std::vector<EmotionPoint> out;
  if (!first_) {
    first_ = raw;
    target_ = raw;
    rendered_ = raw;
    out.push_back(raw);
    next_index_ = 1;
    return out;
  }
  if (!(raw.t > target_.t)) throw InvalidArgument("raw points must have strictly increasing t");

  while (true) {
    const double t = first_->t + static_cast<double>(next_index_) / spec_.render_rate;
    if (t > raw.t + kTimeEpsilon) break;
    const EmotionPoint& p = (t + kTimeEpsilon >= raw.t) ? raw : target_;
    rendered_.valence = p.valence + (rendered_.valence - p.valence) * decay_;
    rendered_.arousal = p.arousal + (rendered_.arousal - p.arousal) * decay_;
    rendered_.t = t;
    out.push_back(rendered_);
    ++next_index_;
  }
  target_ = raw;
  return out;
}

EmotionTrace smooth(const EmotionTrace& trace, const SmoothingSpec& spec) {
  if (trace.empty()) throw InvalidArgument("cannot smooth an empty trace");
  ExponentialSmoother smoother(spec);
  EmotionTrace out;
  out.source_id = trace.source_id;
  for (const auto& p : trace.points) {
    auto rendered = smoother.feed(p);
    out.points.insert(out.points.end(), rendered.begin(), rendered.end());
  }
  return out;
}

}  // namespace emodec
