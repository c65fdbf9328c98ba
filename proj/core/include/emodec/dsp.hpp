#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "emodec/audio_io.hpp"

namespace emodec {

enum class Window : std::uint8_t { Hann, Rectangular };

/// Magnitude spectrogram, row-major [frame][bin].
struct Spectrogram {
  std::size_t n_frames = 0;
  std::size_t n_bins = 0;
  std::size_t fft_size = 0;
  std::size_t hop = 0;
  double frame_rate = 0.0;
  std::vector<double> magnitudes;
  std::vector<double> bin_frequencies;

  double at(std::size_t frame, std::size_t bin) const { return magnitudes[frame * n_bins + bin]; }
  std::span<const double> frame(std::size_t t) const {
    return std::span<const double>(magnitudes).subspan(t * n_bins, n_bins);
  }
};

/// Framed RMS amplitude; frame_times are frame centres in seconds.
struct RmsTrace {
  std::vector<double> values;
  std::vector<double> frame_times;
  FrameSpec frame_spec;
  int sample_rate = kCanonicalSampleRate;
};

struct OnsetDetectionFunction {
  std::vector<double> values;
  double frame_rate = 0.0;
};

/// Strictly increasing onset times in seconds.
struct OnsetList {
  std::vector<double> onset_times;
  std::size_t size() const noexcept { return onset_times.size(); }
};

struct SuperFluxParams {
  std::size_t lag = 2;        ///< frames
  std::size_t max_width = 3;  ///< bins, odd
};

/// Windows are in seconds and converted to frames with the ODF frame rate.
/// The threshold added to the local mean is
///   max(relative_delta * max(odf), delta).
struct PeakPickParams {
  double pre_max = 0.030;
  double post_max = 0.030;
  double pre_avg = 0.100;
  double post_avg = 0.070;
  double relative_delta = 0.05;
  double delta = 1.0;
  double min_ioi = 0.030;

  void validate() const;
};

struct OnsetConfig {
  std::size_t fft_size = 2048;
  std::size_t hop = 220;
  Window window = Window::Hann;
  SuperFluxParams superflux;
  PeakPickParams peaks;
};

struct DspConfig {
  OnsetConfig onsets;
  FrameSpec rms{2048, 512};
};

RmsTrace rms_trace(std::span<const double> samples, int sample_rate, const FrameSpec& spec);
inline RmsTrace rms_trace(const AudioBuffer& buf, const FrameSpec& spec) {
  return rms_trace(buf.view(), buf.sample_rate, spec);
}

/// Mean of the values whose frame centre lies in [t_start, t_end); 0.0 for an empty window.
double mean_rms(const RmsTrace& trace, double t_start, double t_end);

/// Magnitude STFT without padding: frame t covers samples [t*hop, t*hop + fft_size).
Spectrogram stft(std::span<const double> samples, int sample_rate, std::size_t fft_size, std::size_t hop,
                 Window window = Window::Hann);
inline Spectrogram stft(const AudioBuffer& buf, std::size_t fft_size, std::size_t hop, Window window = Window::Hann) {
  return stft(buf.view(), buf.sample_rate, fft_size, hop, window);
}

/// Periodic window of length n (the STFT taper).
std::vector<double> make_window(Window window, std::size_t n);

/// Positive log-magnitude flux against a lagged, frequency-max-filtered reference frame.
OnsetDetectionFunction superflux_odf(const Spectrogram& spec, std::size_t lag, std::size_t max_width);
inline OnsetDetectionFunction superflux_odf(const Spectrogram& spec, const SuperFluxParams& p = {}) {
  return superflux_odf(spec, p.lag, p.max_width);
}

OnsetList pick_onsets(const OnsetDetectionFunction& odf, const PeakPickParams& params = {});

/// Onsets per second in [t_start, t_end).
double onset_density(const OnsetList& onsets, double t_start, double t_end);

/// stft -> superflux_odf -> pick_onsets.
OnsetList detect_onsets(std::span<const double> samples, int sample_rate, const OnsetConfig& config = {});

/// The two signal-derived features for one analysis window.
struct WindowDynamics {
  double onset_density = 0.0;
  double mean_rms = 0.0;
};

/// Features computed from `samples` alone: onset count over the window length and
/// the mean of the framed RMS trace.
WindowDynamics analyze_window(std::span<const double> samples, int sample_rate, const DspConfig& config = {});

std::string rms_csv(const RmsTrace& trace);
std::string onsets_csv(const OnsetList& onsets);

}  // namespace emodec
