#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "emodec/audio_io.hpp"
#include "emodec/dsp.hpp"
#include "emodec/error.hpp"
#include "signals.hpp"
#include "temp_dir.hpp"

using namespace emodec;
using emodec::testing::TempDir;

namespace {

// Hand-rolled RIFF writer, independent of write_wav, for decoder oracles.
void put_u16(std::string& s, std::uint16_t v) { s.append({char(v & 0xff), char(v >> 8)}); }
void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}

std::string riff(std::uint16_t format, std::uint16_t channels, std::uint32_t rate, std::uint16_t bits,
                 const std::string& data) {
  std::string fmt;
  put_u16(fmt, format);
  put_u16(fmt, channels);
  put_u32(fmt, rate);
  put_u32(fmt, rate * channels * bits / 8);
  put_u16(fmt, static_cast<std::uint16_t>(channels * bits / 8));
  put_u16(fmt, bits);
  std::string out = "RIFF";
  put_u32(out, static_cast<std::uint32_t>(4 + 8 + fmt.size() + 8 + data.size()));
  out += "WAVEfmt ";
  put_u32(out, static_cast<std::uint32_t>(fmt.size()));
  out += fmt;
  out += "data";
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  out += data;
  return out;
}

void dump(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

double rms(const std::vector<double>& x, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s += x[i] * x[i];
  return std::sqrt(s / static_cast<double>(to - from));
}

}  // namespace

TEST_CASE("load_wav: one second of 16-bit silence at 44.1 kHz") {
  TempDir dir;
  dump(dir / "s.wav", riff(1, 1, 44100, 16, std::string(44100 * 2, '\0')));
  const auto buf = load_wav(dir / "s.wav");
  CHECK(buf.sample_rate == 44100);
  REQUIRE(buf.size() == 44100);
  CHECK(std::all_of(buf.samples.begin(), buf.samples.end(), [](double v) { return v == 0.0; }));
  CHECK(buf.duration_seconds() == 1.0);
}

TEST_CASE("load_wav: antiphase stereo downmixes to zero") {
  TempDir dir;
  const std::vector<double> l(1000, 0.5), r(1000, -0.5);
  write_wav(dir / "st.wav", {l, r}, 22050, WavEncoding::Float32);
  const auto buf = load_wav(dir / "st.wav");
  REQUIRE(buf.size() == 1000);
  for (double v : buf.samples) CHECK(v == 0.0);
}

TEST_CASE("load_wav: full-scale 16-bit square wave") {
  TempDir dir;
  std::string data;
  std::vector<std::int16_t> ints;
  for (int i = 0; i < 800; ++i) ints.push_back((i / 50) % 2 == 0 ? 32767 : -32768);
  for (auto v : ints) put_u16(data, static_cast<std::uint16_t>(v));
  dump(dir / "sq.wav", riff(1, 1, 8000, 16, data));
  const auto buf = load_wav(dir / "sq.wav");
  REQUIRE(buf.size() == ints.size());
  for (std::size_t i = 0; i < ints.size(); ++i) {
    const double expected = ints[i] / 32768.0;
    CHECK(buf.samples[i] == expected);
    CHECK(std::abs(std::abs(buf.samples[i]) - 1.0) <= 1.0 / 32768.0);
  }
}

TEST_CASE("load_wav: 24-bit integer scaling") {
  TempDir dir;
  std::string data;
  const std::vector<std::int32_t> ints = {0, 8388607, -8388608, 4194304, -1};
  for (auto v : ints) {
    const auto u = static_cast<std::uint32_t>(v);
    data.append({char(u & 0xff), char((u >> 8) & 0xff), char((u >> 16) & 0xff)});
  }
  dump(dir / "p24.wav", riff(1, 1, 22050, 24, data));
  const auto buf = load_wav(dir / "p24.wav");
  REQUIRE(buf.size() == ints.size());
  for (std::size_t i = 0; i < ints.size(); ++i) CHECK(buf.samples[i] == ints[i] / 8388608.0);
}

TEST_CASE("load_wav: WAVE_FORMAT_EXTENSIBLE with PCM subformat") {
  TempDir dir;
  std::string fmt;
  put_u16(fmt, 0xFFFE);
  put_u16(fmt, 1);
  put_u32(fmt, 16000);
  put_u32(fmt, 32000);
  put_u16(fmt, 2);
  put_u16(fmt, 16);
  put_u16(fmt, 22);
  put_u16(fmt, 16);
  put_u32(fmt, 0x4);
  put_u16(fmt, 1);  // KSDATAFORMAT_SUBTYPE_PCM prefix
  fmt += std::string("\x00\x00\x00\x00\x10\x00\x80\x00\x00\xAA\x00\x38\x9B\x71", 14);
  std::string data;
  put_u16(data, 16384);
  put_u16(data, static_cast<std::uint16_t>(-16384));
  std::string bytes = "RIFF";
  put_u32(bytes, static_cast<std::uint32_t>(4 + 8 + fmt.size() + 8 + data.size()));
  bytes += "WAVEfmt ";
  put_u32(bytes, static_cast<std::uint32_t>(fmt.size()));
  bytes += fmt + "data";
  put_u32(bytes, static_cast<std::uint32_t>(data.size()));
  bytes += data;
  dump(dir / "ext.wav", bytes);
  const auto buf = load_wav(dir / "ext.wav");
  CHECK(buf.sample_rate == 16000);
  REQUIRE(buf.size() == 2);
  CHECK(buf.samples[0] == 0.5);
  CHECK(buf.samples[1] == -0.5);
}

TEST_CASE("load_wav: errors") {
  TempDir dir;
  SUBCASE("missing file names the path") {
    try {
      load_wav(dir / "nope.wav");
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("nope.wav") != std::string::npos);
    }
  }
  SUBCASE("8-bit PCM is reported with its encoding") {
    dump(dir / "u8.wav", riff(1, 1, 8000, 8, std::string(100, '\x80')));
    try {
      load_wav(dir / "u8.wav");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("8") != std::string::npos);
    }
  }
  SUBCASE("three channels are rejected") {
    dump(dir / "c3.wav", riff(1, 3, 8000, 16, std::string(60, '\0')));
    CHECK_THROWS_AS(load_wav(dir / "c3.wav"), FormatError);
  }
  SUBCASE("not a RIFF file") {
    dump(dir / "junk.wav", "hello, this is not audio at all");
    CHECK_THROWS_AS(load_wav(dir / "junk.wav"), FormatError);
  }
}

TEST_CASE("load_wav is deterministic") {
  TempDir dir;
  const auto piece = emodec::testing::synthetic_piece(2.0, 3);
  write_wav(dir / "p.wav", piece, WavEncoding::Pcm24);
  const auto a = load_wav(dir / "p.wav");
  const auto b = load_wav(dir / "p.wav");
  REQUIRE(a.size() == b.size());
  CHECK(std::memcmp(a.samples.data(), b.samples.data(), a.size() * sizeof(double)) == 0);
}

TEST_CASE("write_wav/load_wav float32 round trip is exact for float-representable samples") {
  TempDir dir;
  AudioBuffer buf;
  buf.sample_rate = 32000;
  for (int i = 0; i < 100; ++i) buf.samples.push_back(static_cast<float>(std::sin(i * 0.1) * 0.9));
  write_wav(dir / "f.wav", buf, WavEncoding::Float32);
  const auto back = load_wav(dir / "f.wav");
  CHECK(back.sample_rate == 32000);
  CHECK(back.samples == buf.samples);
}

TEST_CASE("load_audio resamples to the canonical rate") {
  TempDir dir;
  write_wav(dir / "a.wav", emodec::testing::sine(440.0, 0.5, 1.0, 44100));
  const auto buf = load_audio(dir / "a.wav");
  CHECK(buf.sample_rate == kCanonicalSampleRate);
  CHECK(buf.size() == 22050);
}

TEST_CASE("resample: identity when rates match") {
  const auto piece = emodec::testing::synthetic_piece(1.5, 9);
  const auto same = resample(piece, piece.sample_rate);
  CHECK(same.sample_rate == piece.sample_rate);
  REQUIRE(same.size() == piece.size());
  CHECK(std::memcmp(same.samples.data(), piece.samples.data(), piece.size() * sizeof(double)) == 0);
}

TEST_CASE("resample: 440 Hz keeps its peak bin after 44.1k -> 22.05k") {
  const auto src = emodec::testing::sine(440.0, 0.8, 2.0, 44100);
  const auto dst = resample(src, 22050);
  const auto spec = stft(dst, 2048, 512);
  const double expected_bin = 440.0 * 2048.0 / 22050.0;  // 40.87
  for (std::size_t f = 0; f < spec.n_frames; ++f) {
    const auto row = spec.frame(f);
    const auto peak = static_cast<double>(std::max_element(row.begin(), row.end()) - row.begin());
    CHECK(std::abs(peak - expected_bin) <= 1.0);
  }
}

TEST_CASE("resample: duration preserved for 48k -> 22.05k") {
  const auto src = emodec::testing::sine(300.0, 0.5, 1.0, 48000);
  const auto dst = resample(src, 22050);
  CHECK(std::abs(static_cast<long>(dst.size()) - 22050L) <= 1);
}

TEST_CASE("resample: A->B->A preserves RMS of a band-limited tone within 1%") {
  for (const auto& [a, b] : {std::pair{22050, 44100}, std::pair{44100, 22050}, std::pair{48000, 22050},
                            std::pair{22050, 16000}}) {
    CAPTURE(a);
    CAPTURE(b);
    const auto src = emodec::testing::sine(1000.0, 0.6, 1.0, a);
    const auto back = resample(resample(src, b), a);
    const std::size_t n = std::min(src.size(), back.size());
    const std::size_t edge = static_cast<std::size_t>(a / 20);  // skip filter edges
    const double r0 = rms(src.samples, edge, n - edge);
    const double r1 = rms(back.samples, edge, n - edge);
    CHECK(std::abs(r1 - r0) / r0 < 0.01);
  }
}

TEST_CASE("resample: output stays in [-1, 1]") {
  AudioBuffer sq;
  sq.sample_rate = 44100;
  for (int i = 0; i < 44100; ++i) sq.samples.push_back((i / 40) % 2 == 0 ? 1.0 : -1.0);
  const auto out = resample(sq, 22050);
  for (double v : out.samples) REQUIRE(std::abs(v) <= 1.0);
}

TEST_CASE("frames: hand-enumerated examples") {
  std::vector<double> x(10);
  std::iota(x.begin(), x.end(), 0.0);
  const auto f = frames(x, FrameSpec{4, 2});
  REQUIRE(f.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(f[k].size() == 4);
    CHECK(f[k][0] == static_cast<double>(2 * k));
  }
  CHECK(frames(std::span<const double>(x).first(3), FrameSpec{4, 2}).empty());
  CHECK(frames(std::span<const double>(x).first(4), FrameSpec{4, 4}).size() == 1);
}

TEST_CASE("frames: starts form the progression 0, hop, 2*hop, ...") {
  std::vector<double> x(1000);
  std::iota(x.begin(), x.end(), 0.0);
  for (std::size_t len : {1u, 3u, 64u, 257u}) {
    for (std::size_t hop = 1; hop <= len; hop += std::max<std::size_t>(1, len / 5)) {
      const FrameSpec spec{len, hop};
      const auto f = frames(x, spec);
      REQUIRE(f.size() == spec.frame_count(x.size()));
      REQUIRE(f.size() == (x.size() - len) / hop + 1);
      for (std::size_t k = 0; k < f.size(); ++k) REQUIRE(f[k][0] == static_cast<double>(k * hop));
    }
  }
}

TEST_CASE("FrameSpec::validate") {
  CHECK_THROWS_AS(FrameSpec({4, 0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(FrameSpec({4, 5}).validate(), InvalidArgument);
  CHECK_NOTHROW(FrameSpec({4, 4}).validate());
}

TEST_CASE("PacedSource: offline single chunk is immediate") {
  PacedSource src(emodec::testing::constant(0.1, 1.0), 22050, Pacing::Offline);
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = src.next();
  const auto dt = std::chrono::steady_clock::now() - t0;
  REQUIRE(c.has_value());
  CHECK(c->samples.size() == 22050);
  CHECK(dt < std::chrono::milliseconds(100));
  CHECK_FALSE(src.next().has_value());
}

TEST_CASE("PacedSource: real-time single chunk arrives after about one second") {
  PacedSource src(emodec::testing::constant(0.1, 1.0), 22050, Pacing::RealTime);
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = src.next();
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(c.has_value());
  CHECK(dt >= 0.95);
  CHECK(dt < 1.5);
}

TEST_CASE("PacedSource: 5 s in 0.5 s chunks gives 10 chunks with increasing timestamps") {
  PacedSource src(emodec::testing::constant(0.1, 5.0), 11025, Pacing::RealTime, 50.0);
  CHECK(src.chunk_count() == 10);
  std::vector<AudioChunk> chunks;
  while (auto c = src.next()) chunks.push_back(std::move(*c));
  REQUIRE(chunks.size() == 10);
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    CHECK(chunks[i].first_sample == i * 11025);
    CHECK(chunks[i].start_time() == doctest::Approx(0.5 * static_cast<double>(i)));
    if (i > 0) CHECK(chunks[i].start_time() > chunks[i - 1].start_time());
  }
}

TEST_CASE("PacedSource: final partial chunk is emitted as-is") {
  PacedSource src(emodec::testing::constant(0.1, 1.0), 10000, Pacing::Offline);
  std::vector<std::size_t> sizes;
  while (auto c = src.next()) sizes.push_back(c->samples.size());
  CHECK(sizes == std::vector<std::size_t>{10000, 10000, 2050});
}

TEST_CASE("PacedSource: invalid arguments") {
  CHECK_THROWS_AS(PacedSource(emodec::testing::constant(0.0, 1.0), 0), InvalidArgument);
  CHECK_THROWS_AS(PacedSource(emodec::testing::constant(0.0, 1.0), 10, Pacing::RealTime, 0.0), InvalidArgument);
}
