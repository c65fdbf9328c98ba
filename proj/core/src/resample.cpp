#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "emodec/audio_io.hpp"
#include "emodec/error.hpp"

namespace emodec {

namespace {

// Kernel: sinc(u) * kaiser(u / kZeroCrossings), tabulated over u in [0, kZeroCrossings]
// at kOversample points per zero crossing and linearly interpolated.
constexpr int kZeroCrossings = 16;
constexpr int kOversample = 512;
constexpr double kKaiserBeta = 8.6;
// Passband edge relative to the lower Nyquist frequency.
constexpr double kRolloff = 0.945;

struct KernelTable {
  std::vector<double> values;

  KernelTable() : values(kZeroCrossings * kOversample + 2, 0.0) {
    const double norm = std::cyl_bessel_i(0.0, kKaiserBeta);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double u = static_cast<double>(i) / kOversample;
      if (u >= kZeroCrossings) {
        values[i] = 0.0;
        continue;
      }
      const double r = u / kZeroCrossings;
      const double window = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) / norm;
      const double sinc = u == 0.0 ? 1.0 : std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
      values[i] = sinc * window;
    }
  }

  double operator()(double u) const {
    u = std::abs(u);
    const double pos = u * kOversample;
    const auto idx = static_cast<std::size_t>(pos);
    if (idx + 1 >= values.size()) return 0.0;
    const double frac = pos - static_cast<double>(idx);
    return values[idx] + frac * (values[idx + 1] - values[idx]);
  }
};

const KernelTable& kernel() {
  static const KernelTable table;
  return table;
}

}  // namespace

AudioBuffer resample(const AudioBuffer& buf, int target_rate) {
  if (target_rate <= 0) throw InvalidArgument("target sample rate must be positive");
  if (buf.sample_rate <= 0) throw InvalidArgument("source sample rate must be positive");
  if (target_rate == buf.sample_rate) return buf;

  const auto src_rate = static_cast<std::uint64_t>(buf.sample_rate);
  const auto dst_rate = static_cast<std::uint64_t>(target_rate);
  const std::uint64_t n_in = buf.samples.size();
  const std::uint64_t n_out = (n_in * dst_rate + src_rate / 2) / src_rate;

  const double ratio = static_cast<double>(dst_rate) / static_cast<double>(src_rate);
  const double cutoff = std::min(1.0, ratio) * kRolloff;  // in units of the source Nyquist
  const double half_width = kZeroCrossings / cutoff;      // in source samples
  const KernelTable& k = kernel();

  AudioBuffer out;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);
  const auto last = static_cast<std::int64_t>(n_in) - 1;
  for (std::uint64_t n = 0; n < n_out; ++n) {
    const double x = static_cast<double>(n * src_rate) / static_cast<double>(dst_rate);
    const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(x - half_width)));
    const auto hi = std::min<std::int64_t>(last, static_cast<std::int64_t>(std::floor(x + half_width)));
    double acc = 0.0;
    for (std::int64_t i = lo; i <= hi; ++i) {
      acc += buf.samples[static_cast<std::size_t>(i)] * k(cutoff * (x - static_cast<double>(i)));
    }
    out.samples[n] = std::clamp(acc * cutoff, -1.0, 1.0);
  }
  return out;
}

}  // namespace emodec
