#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace emodec {

/// All analysis runs at this rate; `load_audio` resamples every input to it.
inline constexpr int kCanonicalSampleRate = 22050;

/// Mono signal with samples in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = kCanonicalSampleRate;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double duration_seconds() const noexcept {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
  }
  std::span<const double> view() const noexcept { return samples; }
};

/// Rectangular framing: frame k covers [k*hop_length, k*hop_length + frame_length).
struct FrameSpec {
  std::size_t frame_length = 2048;
  std::size_t hop_length = 512;

  /// Throws InvalidArgument unless 0 < hop_length <= frame_length.
  void validate() const;

  /// N = floor((n - frame_length) / hop_length) + 1 for n >= frame_length, else 0.
  std::size_t frame_count(std::size_t n_samples) const noexcept {
    if (n_samples < frame_length || hop_length == 0) return 0;
    return (n_samples - frame_length) / hop_length + 1;
  }
};

/// Views into `samples`; trailing samples that do not fill a frame are dropped.
std::vector<std::span<const double>> frames(std::span<const double> samples, const FrameSpec& spec);

// WAV (RIFF) input.

enum class WavEncoding : std::uint8_t { Pcm16, Pcm24, Float32 };

/// Decodes PCM16, PCM24 or float32 WAV with 1 or 2 channels; stereo is averaged to mono.
/// The header sample rate is preserved.
AudioBuffer load_wav(const std::filesystem::path& path);

/// load_wav followed by resampling to kCanonicalSampleRate.
AudioBuffer load_audio(const std::filesystem::path& path);

/// Interleaved writer used for fixtures and round trips. `channels` holds one
/// vector per channel, all of equal length.
void write_wav(const std::filesystem::path& path, const std::vector<std::vector<double>>& channels,
               int sample_rate, WavEncoding encoding = WavEncoding::Pcm16);

inline void write_wav(const std::filesystem::path& path, const AudioBuffer& buf,
                      WavEncoding encoding = WavEncoding::Pcm16) {
  write_wav(path, std::vector<std::vector<double>>{buf.samples}, buf.sample_rate, encoding);
}

/// Band-limited (Kaiser-windowed sinc) sample-rate conversion. Returns an exact
/// copy when the rates already match.
AudioBuffer resample(const AudioBuffer& buf, int target_rate);

// Paced sources.

enum class Pacing : std::uint8_t {
  RealTime,  ///< each chunk is released once its last sample would have been captured
  Offline,   ///< chunks are released immediately
};

struct AudioChunk {
  std::vector<double> samples;
  std::size_t first_sample = 0;  ///< position of samples[0] on the sample clock
  int sample_rate = kCanonicalSampleRate;

  double start_time() const noexcept { return static_cast<double>(first_sample) / sample_rate; }
  double end_time() const noexcept {
    return static_cast<double>(first_sample + samples.size()) / sample_rate;
  }
};

/// Splits a buffer into consecutive chunks, optionally at wall-clock rate.
/// Single consumer; `speed` > 1 plays faster than real time.
class PacedSource {
 public:
  PacedSource(AudioBuffer buffer, std::size_t chunk_samples, Pacing pacing = Pacing::RealTime,
              double speed = 1.0);

  /// Blocks until the next chunk is due; std::nullopt once the buffer is exhausted.
  std::optional<AudioChunk> next();

  std::size_t chunk_count() const noexcept;
  int sample_rate() const noexcept { return buffer_.sample_rate; }
  double duration_seconds() const noexcept { return buffer_.duration_seconds(); }

 private:
  AudioBuffer buffer_;
  std::size_t chunk_;
  Pacing pacing_;
  double speed_;
  std::size_t position_ = 0;
  std::optional<std::chrono::steady_clock::time_point> started_;
};

}  // namespace emodec
