#include "emodec/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <thread>

#include "emodec/error.hpp"
#include "emodec/io_util.hpp"

namespace emodec {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open audio file: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read audio file: " + path.string());
  return bytes;
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

std::string describe(const FmtChunk& f) {
  std::string kind = f.format == kFormatPcm ? "integer PCM" : f.format == kFormatFloat ? "IEEE float" : "format tag " + std::to_string(f.format);
  return kind + ", " + std::to_string(f.bits) + "-bit, " + std::to_string(f.channels) + " channel(s)";
}

}  // namespace

void FrameSpec::validate() const {
  if (frame_length == 0 || hop_length == 0) throw InvalidArgument("frame and hop length must be positive");
  if (hop_length > frame_length) throw InvalidArgument("hop length must not exceed frame length");
}

std::vector<std::span<const double>> frames(std::span<const double> samples, const FrameSpec& spec) {
  spec.validate();
  const std::size_t n = spec.frame_count(samples.size());
  std::vector<std::span<const double>> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(samples.subspan(k * spec.hop_length, spec.frame_length));
  return out;
}

AudioBuffer load_wav(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  const std::string name = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file: " + name);
  }

  std::optional<FmtChunk> fmt;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* header = bytes.data() + pos;
    const std::uint32_t size = read_u32(header + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(header, "fmt ", 4) == 0) {
      if (size < 16 || available < 16) throw FormatError("truncated fmt chunk: " + name);
      const unsigned char* p = bytes.data() + body;
      FmtChunk f;
      f.format = read_u16(p);
      f.channels = read_u16(p + 2);
      f.sample_rate = read_u32(p + 4);
      f.bits = read_u16(p + 14);
      if (f.format == kFormatExtensible) {
        if (size < 40 || available < 40) throw FormatError("truncated extensible fmt chunk: " + name);
        f.format = read_u16(p + 24);  // first two bytes of the subformat GUID
      }
      fmt = f;
    } else if (std::memcmp(header, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = std::min<std::size_t>(size, available);  // tolerate streamed headers
    }
    pos = body + size + (size & 1u);
  }

  if (!fmt) throw FormatError("missing fmt chunk: " + name);
  if (!data) throw FormatError("missing data chunk: " + name);

  const FmtChunk& f = *fmt;
  const bool supported = (f.format == kFormatPcm && (f.bits == 16 || f.bits == 24)) ||
                         (f.format == kFormatFloat && f.bits == 32);
  if (!supported || f.channels < 1 || f.channels > 2) {
    throw FormatError("unsupported WAV encoding (" + describe(f) + "): " + name);
  }
  if (f.sample_rate == 0) throw FormatError("zero sample rate: " + name);

  const std::size_t bytes_per_sample = f.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * f.channels;
  const std::size_t n_frames = data_size / frame_bytes;

  auto decode = [&](const unsigned char* p) -> double {
    switch (f.bits) {
      case 16: {
        const auto v = static_cast<std::int16_t>(read_u16(p));
        return static_cast<double>(v) / 32768.0;
      }
      case 24: {
        std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
        if (v & 0x800000) v -= 0x1000000;
        return static_cast<double>(v) / 8388608.0;
      }
      default: {
        const std::uint32_t bits = read_u32(p);
        float v;
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v)) throw FormatError("non-finite float sample in " + name);
        return std::clamp(static_cast<double>(v), -1.0, 1.0);
      }
    }
  };

  AudioBuffer buf;
  buf.sample_rate = static_cast<int>(f.sample_rate);
  buf.samples.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const unsigned char* p = data + i * frame_bytes;
    if (f.channels == 1) {
      buf.samples[i] = decode(p);
    } else {
      buf.samples[i] = 0.5 * (decode(p) + decode(p + bytes_per_sample));
    }
  }
  return buf;
}

AudioBuffer load_audio(const std::filesystem::path& path) { return resample(load_wav(path), kCanonicalSampleRate); }

void write_wav(const std::filesystem::path& path, const std::vector<std::vector<double>>& channels, int sample_rate,
               WavEncoding encoding) {
  if (channels.empty() || channels.size() > 2) throw InvalidArgument("write_wav supports 1 or 2 channels");
  if (sample_rate <= 0) throw InvalidArgument("sample rate must be positive");
  const std::size_t n = channels.front().size();
  for (const auto& c : channels) {
    if (c.size() != n) throw InvalidArgument("channel lengths differ");
  }
  const std::uint16_t n_ch = static_cast<std::uint16_t>(channels.size());
  const std::uint16_t bits = encoding == WavEncoding::Pcm16 ? 16 : encoding == WavEncoding::Pcm24 ? 24 : 32;
  const std::uint16_t format = encoding == WavEncoding::Float32 ? kFormatFloat : kFormatPcm;
  const std::uint32_t block = n_ch * (bits / 8u);
  const std::uint32_t data_size = static_cast<std::uint32_t>(n * block);

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put_u32(out, 36 + data_size);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, format);
  put_u16(out, n_ch);
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate) * block);
  put_u16(out, static_cast<std::uint16_t>(block));
  put_u16(out, bits);
  out += "data";
  put_u32(out, data_size);

  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& c : channels) {
      const double v = std::clamp(c[i], -1.0, 1.0);
      switch (encoding) {
        case WavEncoding::Pcm16: {
          const long q = std::clamp(std::lround(v * 32768.0), -32768L, 32767L);
          put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
          break;
        }
        case WavEncoding::Pcm24: {
          const long q = std::clamp(std::lround(v * 8388608.0), -8388608L, 8388607L);
          const auto u = static_cast<std::uint32_t>(q) & 0xFFFFFFu;
          out.push_back(static_cast<char>(u & 0xFF));
          out.push_back(static_cast<char>((u >> 8) & 0xFF));
          out.push_back(static_cast<char>((u >> 16) & 0xFF));
          break;
        }
        case WavEncoding::Float32: {
          const float fv = static_cast<float>(v);
          std::uint32_t u;
          std::memcpy(&u, &fv, sizeof u);
          put_u32(out, u);
          break;
        }
      }
    }
  }
  write_file_atomic(path, out);
}

PacedSource::PacedSource(AudioBuffer buffer, std::size_t chunk_samples, Pacing pacing, double speed)
    : buffer_(std::move(buffer)), chunk_(chunk_samples), pacing_(pacing), speed_(speed) {
  if (chunk_ == 0) throw InvalidArgument("chunk size must be positive");
  if (!(speed_ > 0.0)) throw InvalidArgument("pacing speed must be positive");
}

std::size_t PacedSource::chunk_count() const noexcept { return (buffer_.size() + chunk_ - 1) / chunk_; }

std::optional<AudioChunk> PacedSource::next() {
  if (position_ >= buffer_.size()) return std::nullopt;
  if (!started_) started_ = std::chrono::steady_clock::now();

  const std::size_t end = std::min(buffer_.size(), position_ + chunk_);
  if (pacing_ == Pacing::RealTime) {
    const double due_s = static_cast<double>(end) / buffer_.sample_rate / speed_;
    const auto due = *started_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                     std::chrono::duration<double>(due_s));
    std::this_thread::sleep_until(due);
  }

  AudioChunk chunk;
  chunk.first_sample = position_;
  chunk.sample_rate = buffer_.sample_rate;
  chunk.samples.assign(buffer_.samples.begin() + static_cast<std::ptrdiff_t>(position_),
                       buffer_.samples.begin() + static_cast<std::ptrdiff_t>(end));
  position_ = end;
  return chunk;
}

}  // namespace emodec
