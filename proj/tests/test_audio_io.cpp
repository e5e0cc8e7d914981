#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "respire/audio.hpp"
#include "respire/rng.hpp"

using namespace respire;

namespace {

// Hand-built 16-bit PCM WAV around the given interleaved samples.
std::vector<std::uint8_t> make_wav16(const std::vector<std::int16_t>& samples,
                                     int channels, int rate) {
    std::vector<std::uint8_t> b(44 + samples.size() * 2);
    auto u32 = [&](std::size_t off, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            b[off + static_cast<std::size_t>(i)] = (v >> (8 * i)) & 0xff;
        }
    };
    auto u16 = [&](std::size_t off, std::uint16_t v) {
        b[off] = v & 0xff;
        b[off + 1] = (v >> 8) & 0xff;
    };
    std::memcpy(b.data(), "RIFF", 4);
    u32(4, static_cast<std::uint32_t>(36 + samples.size() * 2));
    std::memcpy(b.data() + 8, "WAVE", 4);
    std::memcpy(b.data() + 12, "fmt ", 4);
    u32(16, 16);
    u16(20, 1);
    u16(22, static_cast<std::uint16_t>(channels));
    u32(24, static_cast<std::uint32_t>(rate));
    u32(28, static_cast<std::uint32_t>(rate * channels * 2));
    u16(32, static_cast<std::uint16_t>(channels * 2));
    u16(34, 16);
    std::memcpy(b.data() + 36, "data", 4);
    u32(40, static_cast<std::uint32_t>(samples.size() * 2));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        u16(44 + i * 2, static_cast<std::uint16_t>(samples[i]));
    }
    return b;
}

AudioClip tone_with_silence(double lead_s, double tone_s, double trail_s,
                            double freq = 440.0, int sr = 22050) {
    AudioClip clip;
    clip.sample_rate_hz = sr;
    const auto lead = static_cast<std::size_t>(lead_s * sr);
    const auto tone = static_cast<std::size_t>(tone_s * sr);
    const auto trail = static_cast<std::size_t>(trail_s * sr);
    clip.samples.assign(lead + tone + trail, 0.0);
    for (std::size_t i = 0; i < tone; ++i) {
        clip.samples[lead + i] =
            std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / sr);
    }
    return clip;
}

// Reference trim bounds computed straight from the documented rule:
// full frames, RMS power, threshold relative to the max frame power.
std::pair<std::size_t, std::size_t> trim_bounds_direct(const std::vector<double>& x,
                                                       double db, std::size_t flen,
                                                       std::size_t hop) {
    const std::size_t n = x.size() > flen ? 1 + (x.size() - flen) / hop : 1;
    std::vector<double> power(n);
    double pmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t count = std::min(flen, x.size() - i * hop);
        double acc = 0.0;
        for (std::size_t j = 0; j < count; ++j) {
            acc += x[i * hop + j] * x[i * hop + j];
        }
        power[i] = acc / static_cast<double>(count);
        pmax = std::max(pmax, power[i]);
    }
    const double floor_power = pmax * std::pow(10.0, -db / 10.0);
    std::size_t first = 0;
    while (power[first] < floor_power) ++first;
    std::size_t last = n - 1;
    while (last > first && power[last] < floor_power) --last;
    return {first * hop,
            last == n - 1 ? x.size() : std::min(x.size(), last * hop + flen)};
}

}  // namespace

TEST_SUITE("audio_io") {

TEST_CASE("decode_wav scales 16-bit PCM by 1/32768") {
    const auto bytes = make_wav16({16384, -16384}, 1, 48000);
    const AudioClip clip = decode_wav(bytes, "t");
    REQUIRE(clip.samples.size() == 2);
    CHECK(clip.samples[0] == doctest::Approx(0.5));
    CHECK(clip.samples[1] == doctest::Approx(-0.5));
    CHECK(clip.sample_rate_hz == 48000);
}

TEST_CASE("decode_wav mixes stereo to the channel mean") {
    // one frame: left 0.2, right 0.4 -> 0.3
    const auto l = static_cast<std::int16_t>(std::lround(0.2 * 32768));
    const auto r = static_cast<std::int16_t>(std::lround(0.4 * 32768));
    const AudioClip clip = decode_wav(make_wav16({l, r}, 2, 8000), "t");
    REQUIRE(clip.samples.size() == 1);
    CHECK(clip.samples[0] == doctest::Approx(0.3).epsilon(1e-3));
}

TEST_CASE("decode_wav rejects malformed and unsupported input") {
    auto bytes = make_wav16({1, 2, 3, 4}, 1, 8000);
    SUBCASE("truncated chunk") {
        bytes.resize(46);  // data chunk advertises more than remains
        CHECK_THROWS_AS(decode_wav(bytes, "t"), FormatError);
    }
    SUBCASE("not RIFF") {
        bytes[0] = 'X';
        CHECK_THROWS_AS(decode_wav(bytes, "t"), FormatError);
    }
    SUBCASE("unsupported bit depth") {
        bytes[34] = 8;  // 8-bit PCM
        CHECK_THROWS_AS(decode_wav(bytes, "t"), UnsupportedError);
    }
    SUBCASE("unsupported codec") {
        bytes[20] = 2;  // ADPCM tag
        CHECK_THROWS_AS(decode_wav(bytes, "t"), UnsupportedError);
    }
}

TEST_CASE("pcm16 encode/decode round-trip stays within 1/32768") {
    Rng rng(11);
    AudioClip clip;
    clip.sample_rate_hz = 22050;
    for (int i = 0; i < 4096; ++i) {
        clip.samples.push_back(rng.uniform(-1.0, 1.0));
    }
    const AudioClip back = decode_wav(encode_wav_pcm16(clip), "round");
    REQUIRE(back.samples.size() == clip.samples.size());
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        CHECK(std::abs(back.samples[i] - clip.samples[i]) <= 1.0 / 32768.0);
    }
}

TEST_CASE("resample at the same rate is bit-identical") {
    AudioClip clip = tone_with_silence(0.0, 0.3, 0.0);
    const AudioClip out = resample(clip, clip.sample_rate_hz);
    CHECK(out.samples == clip.samples);
}

TEST_CASE("resample keeps a constant signal constant") {
    AudioClip clip;
    clip.sample_rate_hz = 8000;
    clip.samples.assign(8000, 0.5);
    const AudioClip out = resample(clip, 4000);
    CHECK(out.samples.size() == 4000);
    for (const double s : out.samples) {
        CHECK(s == doctest::Approx(0.5));
    }
}

TEST_CASE("resample matches the hand-evaluated linear interpolation") {
    AudioClip clip;
    clip.sample_rate_hz = 4;
    clip.samples = {0.0, 1.0, 2.0, 3.0};
    SUBCASE("downsample 4 -> 2 Hz") {
        const AudioClip out = resample(clip, 2);
        // positions 0, 2 on the input grid
        REQUIRE(out.samples.size() == 2);
        CHECK(out.samples[0] == doctest::Approx(0.0));
        CHECK(out.samples[1] == doctest::Approx(2.0));
    }
    SUBCASE("upsample 4 -> 8 Hz lands between input samples") {
        const AudioClip out = resample(clip, 8);
        // positions i*0.5: 0, .5, 1, 1.5, ...
        REQUIRE(out.samples.size() == 8);
        CHECK(out.samples[1] == doctest::Approx(0.5));
        CHECK(out.samples[3] == doctest::Approx(1.5));
        CHECK(out.samples[7] == doctest::Approx(3.0));  // clamped at the end
    }
}

TEST_CASE("resample rejects an empty clip") {
    AudioClip clip;
    clip.sample_rate_hz = 8000;
    CHECK_THROWS_AS(resample(clip, 4000), EmptyInputError);
}

TEST_CASE("normalize_amplitude scales the peak to 1 - 1e-6") {
    AudioClip clip;
    clip.sample_rate_hz = 100;
    clip.samples = {0.25, -0.5, 0.1};
    const AudioClip out = normalize_amplitude(clip);
    CHECK(out.samples[0] == doctest::Approx(0.5 * (1.0 - 1e-6)));
    CHECK(out.samples[1] == doctest::Approx(-(1.0 - 1e-6)));
    double peak = 0.0;
    for (const double s : out.samples) {
        peak = std::max(peak, std::abs(s));
    }
    CHECK(peak <= 1.0);
    CHECK(peak == doctest::Approx(1.0 - 1e-6));
}

TEST_CASE("normalize_amplitude passes an all-zero clip through") {
    AudioClip clip;
    clip.sample_rate_hz = 100;
    clip.samples.assign(64, 0.0);
    const AudioClip out = normalize_amplitude(clip);
    CHECK(out.samples == clip.samples);
}

TEST_CASE("normalize_amplitude is idempotent after the first pass") {
    AudioClip clip = tone_with_silence(0.0, 0.2, 0.0);
    clip.samples[5] = 0.31;  // make the peak unique
    const AudioClip once = normalize_amplitude(clip);
    const AudioClip twice = normalize_amplitude(once);
    CHECK(twice.samples == once.samples);
    // ordering preserved under the monotone scaling
    for (std::size_t i = 1; i < clip.samples.size(); ++i) {
        CHECK((clip.samples[i] < clip.samples[i - 1]) ==
              (once.samples[i] < once.samples[i - 1]));
    }
}

TEST_CASE("trim_silence removes 1 s edge silences around a tone") {
    const AudioClip clip = tone_with_silence(1.0, 1.0, 1.0);
    const AudioClip out = trim_silence(clip);

    const auto [begin, end] = trim_bounds_direct(clip.samples, 60.0, 2048, 512);
    CHECK(out.samples.size() == end - begin);
    CHECK(out.samples.front() == clip.samples[begin]);
    CHECK(out.samples.back() == clip.samples[end - 1]);

    // Strictly shorter, tone fully retained, boundary slack below one frame
    // per side.
    const auto sr = static_cast<std::size_t>(clip.sample_rate_hz);
    CHECK(out.samples.size() < clip.samples.size());
    CHECK(out.samples.size() >= sr);
    CHECK(out.samples.size() <= sr + 2 * 2048);
}

TEST_CASE("trim_silence keeps a clip with no silent edges intact") {
    const AudioClip clip = tone_with_silence(0.0, 1.5, 0.0);
    const AudioClip out = trim_silence(clip);
    CHECK(out.samples == clip.samples);
}

TEST_CASE("trim_silence raises AllSilentError on an all-zero clip") {
    AudioClip clip;
    clip.sample_rate_hz = 22050;
    clip.samples.assign(22050, 0.0);
    CHECK_THROWS_AS(trim_silence(clip), AllSilentError);
}

TEST_CASE("trim_silence is exactly idempotent") {
    for (const std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        Rng rng(seed);
        AudioClip clip;
        clip.sample_rate_hz = 22050;
        clip.samples.assign(8000 + rng.below(52000), 0.0);
        // a few sparse bursts with silence elsewhere
        const int n_bursts = 1 + static_cast<int>(rng.below(4));
        for (int b = 0; b < n_bursts; ++b) {
            const std::size_t len = 300 + rng.below(4000);
            const std::size_t start = rng.below(clip.samples.size() - len);
            for (std::size_t i = 0; i < len; ++i) {
                clip.samples[start + i] += rng.uniform(-0.8, 0.8);
            }
        }
        const AudioClip once = trim_silence(clip);
        const AudioClip twice = trim_silence(once);
        CHECK(twice.samples == once.samples);
        CHECK(once.samples.size() <= clip.samples.size());
    }
}

TEST_CASE("trim_silence rejects a negative threshold") {
    AudioClip clip = tone_with_silence(0.2, 0.5, 0.2);
    CHECK_THROWS_AS(trim_silence(clip, -1.0), ParameterError);
}

}  // TEST_SUITE
