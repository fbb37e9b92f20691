#include "doctest.h"

#include "syncscan/audio_io.hpp"
#include "syncscan/errors.hpp"
#include "syncscan/spectral.hpp"

#include "test_util.hpp"

#include <fstream>
#include <random>

using namespace syncscan;
using namespace testutil;

TEST_CASE("PCM16 scaling: constant 16384 loads as 0.5") {
    TempDir tmp("wav-pcm16");
    write_pcm16_wav(tmp.file("c.wav"), std::vector<int16_t>(100, 16384), 1, 44100);
    const AudioBuffer b = load_wav(tmp.file("c.wav"));
    REQUIRE(b.sample_rate_hz == 44100);
    REQUIRE(b.samples.size() == 100);
    for (double s : b.samples) CHECK(s == 0.5);
}

TEST_CASE("stereo downmix averages channels") {
    TempDir tmp("wav-stereo");
    // interleaved (+0.5, -0.5) everywhere
    std::vector<int16_t> frames;
    for (int i = 0; i < 64; ++i) {
        frames.push_back(16384);
        frames.push_back(-16384);
    }
    write_pcm16_wav(tmp.file("s.wav"), frames, 2, 44100);
    const AudioBuffer b = load_wav(tmp.file("s.wav"));
    REQUIRE(b.samples.size() == 64);
    for (double s : b.samples) CHECK(s == 0.0);
}

TEST_CASE("downmix is order-independent") {
    TempDir tmp("wav-swap");
    std::mt19937 rng(123);
    std::vector<int16_t> a, b;
    for (int i = 0; i < 200; ++i) {
        const int16_t l = static_cast<int16_t>(rng() % 20000 - 10000);
        const int16_t r = static_cast<int16_t>(rng() % 20000 - 10000);
        a.push_back(l);
        a.push_back(r);
        b.push_back(r);
        b.push_back(l);
    }
    write_pcm16_wav(tmp.file("a.wav"), a, 2, 44100);
    write_pcm16_wav(tmp.file("b.wav"), b, 2, 44100);
    const AudioBuffer ba = load_wav(tmp.file("a.wav"));
    const AudioBuffer bb = load_wav(tmp.file("b.wav"));
    REQUIRE(ba.samples.size() == bb.samples.size());
    for (size_t i = 0; i < ba.samples.size(); ++i) CHECK(ba.samples[i] == bb.samples[i]);
}

TEST_CASE("float32 WAV above full scale is normalized on load") {
    TempDir tmp("wav-f32");
    WavBuilder w;
    w.tag("RIFF").u32(36 + 8).tag("WAVE");
    w.tag("fmt ").u32(16).u16(3).u16(1).u32(44100).u32(44100 * 4).u16(4).u16(32);
    w.tag("data").u32(8).f32(2.0f).f32(-1.0f);
    w.write(tmp.file("f.wav"));
    const AudioBuffer b = load_wav(tmp.file("f.wav"));
    REQUIRE(b.samples.size() == 2);
    CHECK(b.samples[0] == doctest::Approx(1.0));
    CHECK(b.samples[1] == doctest::Approx(-0.5));
}

TEST_CASE("22050 Hz sine is resampled to 44100 and keeps its frequency") {
    TempDir tmp("wav-resample");
    std::vector<int16_t> samples(22050);
    for (size_t i = 0; i < samples.size(); ++i) {
        samples[i] = static_cast<int16_t>(
            std::llround(0.9 * 32767.0 *
                         std::sin(2.0 * std::numbers::pi * 1000.0 * static_cast<double>(i) / 22050.0)));
    }
    write_pcm16_wav(tmp.file("r.wav"), samples, 1, 22050);
    const AudioBuffer b = load_wav(tmp.file("r.wav"));
    CHECK(b.sample_rate_hz == 44100);
    CHECK(b.samples.size() == 44100);

    const DominantTrack track = dominant_track(b);
    for (const SpectralFrame& f : track.frames) {
        REQUIRE(f.has_dominant);
        CHECK(f.dominant_freq_hz == doctest::Approx(1000.0).epsilon(0.002));
        CHECK(std::abs(f.dominant_freq_hz - 1000.0) <= 2.0);
    }
}

TEST_CASE("unknown chunks are skipped") {
    TempDir tmp("wav-junk");
    WavBuilder w;
    const uint32_t data_size = 4;
    // LIST chunk of odd size 3 (padded) between fmt and data
    w.tag("RIFF").u32(4 + 24 + 12 + 8 + data_size).tag("WAVE");
    w.tag("fmt ").u32(16).u16(1).u16(1).u32(44100).u32(88200).u16(2).u16(16);
    w.tag("LIST").u32(3);
    w.bytes.push_back('x');
    w.bytes.push_back('y');
    w.bytes.push_back('z');
    w.bytes.push_back(0);  // pad
    w.tag("data").u32(data_size).u16(16384).u16(16384);
    w.write(tmp.file("j.wav"));
    const AudioBuffer b = load_wav(tmp.file("j.wav"));
    REQUIRE(b.samples.size() == 2);
    CHECK(b.samples[0] == 0.5);
}

TEST_CASE("loader rejects malformed and unsupported input") {
    TempDir tmp("wav-bad");

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_wav(tmp.file("nope.wav")), IoError);
    }
    SUBCASE("bad RIFF tag") {
        WavBuilder w;
        w.tag("RIFX").u32(36).tag("WAVE");
        w.write(tmp.file("x.wav"));
        CHECK_THROWS_AS(load_wav(tmp.file("x.wav")), FormatError);
    }
    SUBCASE("unsupported codec") {
        WavBuilder w;
        w.tag("RIFF").u32(36 + 4).tag("WAVE");
        w.tag("fmt ").u32(16).u16(2).u16(1).u32(44100).u32(88200).u16(2).u16(16);
        w.tag("data").u32(4).u16(0).u16(0);
        w.write(tmp.file("adpcm.wav"));
        CHECK_THROWS_AS(load_wav(tmp.file("adpcm.wav")), FormatError);
    }
    SUBCASE("zero-length data chunk") {
        WavBuilder w;
        w.tag("RIFF").u32(36).tag("WAVE");
        w.tag("fmt ").u32(16).u16(1).u16(1).u32(44100).u32(88200).u16(2).u16(16);
        w.tag("data").u32(0);
        w.write(tmp.file("empty.wav"));
        CHECK_THROWS_AS(load_wav(tmp.file("empty.wav")), FormatError);
    }
}

TEST_CASE("write/load round trip stays within one quantization step") {
    TempDir tmp("wav-roundtrip");
    std::mt19937_64 rng(7);
    AudioBuffer b;
    b.samples.resize(4096);
    for (double& s : b.samples) {
        s = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    }
    write_wav(b, tmp.file("rt.wav"));
    const AudioBuffer loaded = load_wav(tmp.file("rt.wav"));
    REQUIRE(loaded.samples.size() == b.samples.size());
    for (size_t i = 0; i < b.samples.size(); ++i) {
        CHECK(std::abs(loaded.samples[i] - b.samples[i]) <= 1.0 / 32768.0);
    }
}

TEST_CASE("write_wav clamps and scales: constant 1.0 becomes 32767") {
    TempDir tmp("wav-fullscale");
    AudioBuffer b;
    b.samples.assign(16, 1.0);
    write_wav(b, tmp.file("fs.wav"));

    std::ifstream in(tmp.file("fs.wav"), std::ios::binary);
    std::vector<uint8_t> raw((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
    REQUIRE(raw.size() == 44 + 32);
    for (size_t i = 44; i < raw.size(); i += 2) {
        const int16_t v = static_cast<int16_t>(raw[i] | (raw[i + 1] << 8));
        CHECK(v == 32767);
    }
}

TEST_CASE("write_wav rejects an empty buffer") {
    TempDir tmp("wav-empty-out");
    AudioBuffer b;
    CHECK_THROWS_AS(write_wav(b, tmp.file("e.wav")), InvalidArgument);
}

TEST_CASE("peak_normalize") {
    AudioBuffer b;
    SUBCASE("all zeros unchanged") {
        b.samples.assign(32, 0.0);
        const AudioBuffer n = peak_normalize(b);
        for (double s : n.samples) CHECK(s == 0.0);
    }
    SUBCASE("linear scaling") {
        b.samples = {0.5, -0.25};
        const AudioBuffer n = peak_normalize(b);
        CHECK(n.samples[0] == doctest::Approx(1.0));
        CHECK(n.samples[1] == doctest::Approx(-0.5));
    }
    SUBCASE("over-full-scale input") {
        b.samples = {2.0, -1.0};
        const AudioBuffer n = peak_normalize(b);
        CHECK(n.samples[0] == doctest::Approx(1.0));
        CHECK(n.samples[1] == doctest::Approx(-0.5));
    }
    SUBCASE("idempotent, exactly") {
        std::mt19937_64 rng(99);
        b.samples.resize(512);
        for (double& s : b.samples) {
            s = 1.5 * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
        }
        const AudioBuffer once = peak_normalize(b);
        const AudioBuffer twice = peak_normalize(once);
        for (size_t i = 0; i < once.samples.size(); ++i) {
            CHECK(twice.samples[i] == once.samples[i]);
        }
    }
}

TEST_CASE("bandpass passes in-band and attenuates out-of-band tones") {
    const AudioBuffer in_band = make_sine(3000.0, 1.0);
    const AudioBuffer filtered = bandpass(in_band, 2000.0, 4000.0);
    // skip filter edges when comparing RMS
    std::vector<double> mid_in(in_band.samples.begin() + 500, in_band.samples.end() - 500);
    std::vector<double> mid_out(filtered.samples.begin() + 500, filtered.samples.end() - 500);
    CHECK(std::abs(db(rms(mid_out) / rms(mid_in))) <= 1.0);

    const AudioBuffer out_band = make_sine(1000.0, 1.0);
    const AudioBuffer rejected = bandpass(out_band, 2000.0, 4000.0);
    std::vector<double> mid_rej(rejected.samples.begin() + 500, rejected.samples.end() - 500);
    CHECK(db(rms(mid_rej) / rms(mid_in)) <= -40.0);
}

TEST_CASE("bandpass of silence is silence") {
    AudioBuffer b;
    b.samples.assign(1000, 0.0);
    const AudioBuffer f = bandpass(b, 2000.0, 4000.0);
    for (double s : f.samples) CHECK(s == 0.0);
}

TEST_CASE("bandpass is linear") {
    std::mt19937_64 rng(42);
    AudioBuffer x, y;
    x.samples.resize(2000);
    y.samples.resize(2000);
    for (size_t i = 0; i < 2000; ++i) {
        x.samples[i] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
        y.samples[i] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    }
    const double a = 0.7, c = -0.4;
    AudioBuffer mix;
    mix.samples.resize(2000);
    for (size_t i = 0; i < 2000; ++i) mix.samples[i] = a * x.samples[i] + c * y.samples[i];

    const AudioBuffer fx = bandpass(x, 2000.0, 4000.0);
    const AudioBuffer fy = bandpass(y, 2000.0, 4000.0);
    const AudioBuffer fmix = bandpass(mix, 2000.0, 4000.0);
    for (size_t i = 0; i < 2000; ++i) {
        CHECK(fmix.samples[i] ==
              doctest::Approx(a * fx.samples[i] + c * fy.samples[i]).epsilon(0.0).scale(1.0));
        CHECK(std::abs(fmix.samples[i] - (a * fx.samples[i] + c * fy.samples[i])) <= 1e-6);
    }
}

TEST_CASE("bandpass validates band edges") {
    AudioBuffer b;
    b.samples.assign(1000, 0.0);
    CHECK_THROWS_AS(bandpass(b, 4000.0, 2000.0), InvalidArgument);
    CHECK_THROWS_AS(bandpass(b, 0.0, 2000.0), InvalidArgument);
    CHECK_THROWS_AS(bandpass(b, 2000.0, 30000.0), InvalidArgument);
}

TEST_CASE("bandpass preserves length and compensates group delay") {
    const AudioBuffer tone = make_sine(3000.0, 0.5);
    const AudioBuffer f = bandpass(tone, 2000.0, 4000.0);
    REQUIRE(f.samples.size() == tone.samples.size());
    // mid-buffer samples line up in time (no 127-sample shift)
    double err = 0.0;
    for (size_t i = 5000; i < 15000; ++i) err += std::abs(f.samples[i] - tone.samples[i]);
    CHECK(err / 10000.0 < 0.02);
}
