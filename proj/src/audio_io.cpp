#include "respire/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace respire {

namespace {

constexpr double kPeakEps = 1e-6;

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint32_t>(b[off]) |
           (static_cast<std::uint32_t>(b[off + 1]) << 8) |
           (static_cast<std::uint32_t>(b[off + 2]) << 16) |
           (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint16_t>(b[off] |
                                      (static_cast<std::uint16_t>(b[off + 1]) << 8));
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t off, const char* tag) {
    return std::memcmp(b.data() + off, tag, 4) == 0;
}

double decode_sample(const std::uint8_t* p, int bits, bool is_float) {
    if (is_float) {
        float v;
        std::memcpy(&v, p, 4);
        return static_cast<double>(v);
    }
    switch (bits) {
        case 16: {
            std::int16_t v;
            std::memcpy(&v, p, 2);
            return static_cast<double>(v) / 32768.0;
        }
        case 24: {
            std::int32_t v = (static_cast<std::int32_t>(p[0]) << 8) |
                             (static_cast<std::int32_t>(p[1]) << 16) |
                             (static_cast<std::int32_t>(p[2]) << 24);
            return static_cast<double>(v >> 8) / 8388608.0;
        }
        case 32: {
            std::int32_t v;
            std::memcpy(&v, p, 4);
            return static_cast<double>(v) / 2147483648.0;
        }
        default:
            return 0.0;
    }
}

}  // namespace

AudioClip decode_wav(std::span<const std::uint8_t> bytes, std::string source_id) {
    if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
        throw FormatError("not a RIFF/WAVE stream: " + source_id);
    }

    bool have_fmt = false;
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
    std::size_t data_off = 0;
    std::size_t data_len = 0;

    std::size_t off = 12;
    while (off + 8 <= bytes.size()) {
        const std::uint32_t chunk_len = read_u32(bytes, off + 4);
        const std::size_t body = off + 8;
        if (body + chunk_len > bytes.size()) {
            throw FormatError("truncated chunk in WAV stream: " + source_id);
        }
        if (tag_is(bytes, off, "fmt ")) {
            if (chunk_len < 16) {
                throw FormatError("fmt chunk too short: " + source_id);
            }
            format = read_u16(bytes, body);
            channels = read_u16(bytes, body + 2);
            sample_rate = read_u32(bytes, body + 4);
            bits = read_u16(bytes, body + 14);
            if (format == 0xFFFE) {
                // WAVE_FORMAT_EXTENSIBLE: actual format leads the SubFormat GUID.
                if (chunk_len < 40) {
                    throw FormatError("extensible fmt chunk too short: " + source_id);
                }
                format = read_u16(bytes, body + 24);
            }
            have_fmt = true;
        } else if (tag_is(bytes, off, "data")) {
            data_off = body;
            data_len = chunk_len;
        }
        off = body + chunk_len + (chunk_len & 1);
    }

    if (!have_fmt || data_off == 0) {
        throw FormatError("missing fmt or data chunk: " + source_id);
    }
    if (sample_rate == 0) {
        throw FormatError("zero sample rate: " + source_id);
    }
    if (channels < 1 || channels > 2) {
        throw UnsupportedError("unsupported channel count " + std::to_string(channels) +
                               ": " + source_id);
    }
    const bool is_float = format == 3;
    if (format != 1 && format != 3) {
        throw UnsupportedError("unsupported WAV format tag " + std::to_string(format) +
                               ": " + source_id);
    }
    if (is_float ? bits != 32 : (bits != 16 && bits != 24 && bits != 32)) {
        throw UnsupportedError("unsupported bit depth " + std::to_string(bits) + ": " +
                               source_id);
    }

    const std::size_t bytes_per_sample = bits / 8;
    const std::size_t frame_size = bytes_per_sample * channels;
    const std::size_t n_frames = data_len / frame_size;

    AudioClip clip;
    clip.sample_rate_hz = static_cast<int>(sample_rate);
    clip.source_id = std::move(source_id);
    clip.samples.resize(n_frames);
    const std::uint8_t* p = bytes.data() + data_off;
    for (std::size_t i = 0; i < n_frames; ++i) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
            acc += decode_sample(p + i * frame_size + c * bytes_per_sample,
                                 bits, is_float);
        }
        clip.samples[i] = acc / channels;
    }
    return clip;
}

AudioClip read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_wav(bytes, path);
}

std::vector<std::uint8_t> encode_wav_pcm16(const AudioClip& clip) {
    const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
    const std::uint32_t data_len = n * 2;
    std::vector<std::uint8_t> out(44 + data_len);

    auto put_u32 = [&](std::size_t off, std::uint32_t v) {
        out[off] = v & 0xff;
        out[off + 1] = (v >> 8) & 0xff;
        out[off + 2] = (v >> 16) & 0xff;
        out[off + 3] = (v >> 24) & 0xff;
    };
    auto put_u16 = [&](std::size_t off, std::uint16_t v) {
        out[off] = v & 0xff;
        out[off + 1] = (v >> 8) & 0xff;
    };

    std::memcpy(out.data(), "RIFF", 4);
    put_u32(4, 36 + data_len);
    std::memcpy(out.data() + 8, "WAVE", 4);
    std::memcpy(out.data() + 12, "fmt ", 4);
    put_u32(16, 16);
    put_u16(20, 1);  // PCM
    put_u16(22, 1);  // mono
    put_u32(24, static_cast<std::uint32_t>(clip.sample_rate_hz));
    put_u32(28, static_cast<std::uint32_t>(clip.sample_rate_hz) * 2);
    put_u16(32, 2);
    put_u16(34, 16);
    std::memcpy(out.data() + 36, "data", 4);
    put_u32(40, data_len);

    for (std::uint32_t i = 0; i < n; ++i) {
        const double clamped = std::clamp(clip.samples[i], -1.0, 1.0);
        const long scaled =
            std::clamp<long>(std::lround(clamped * 32768.0), -32768, 32767);
        put_u16(44 + i * 2, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    }
    return out;
}

void write_wav_pcm16(const AudioClip& clip, const std::string& path) {
    const auto bytes = encode_wav_pcm16(clip);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

AudioClip resample(const AudioClip& clip, int target_rate_hz) {
    if (target_rate_hz <= 0) {
        throw ParameterError("target sample rate must be positive");
    }
    if (clip.samples.empty()) {
        throw EmptyInputError("cannot resample an empty clip: " + clip.source_id);
    }
    if (target_rate_hz == clip.sample_rate_hz) {
        return clip;
    }

    const std::size_t in_len = clip.samples.size();
    const double ratio = static_cast<double>(clip.sample_rate_hz) / target_rate_hz;
    const auto out_len = static_cast<std::size_t>(std::llround(
        static_cast<double>(in_len) * target_rate_hz / clip.sample_rate_hz));

    AudioClip out;
    out.sample_rate_hz = target_rate_hz;
    out.source_id = clip.source_id;
    out.samples.resize(std::max<std::size_t>(out_len, 1));
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const double t = static_cast<double>(i) * ratio;
        const auto i0 = std::min(static_cast<std::size_t>(t), in_len - 1);
        const auto i1 = std::min(i0 + 1, in_len - 1);
        const double frac = t - static_cast<double>(i0);
        out.samples[i] = clip.samples[i0] + frac * (clip.samples[i1] - clip.samples[i0]);
    }
    return out;
}

AudioClip normalize_amplitude(const AudioClip& clip) {
    double peak = 0.0;
    for (const double s : clip.samples) {
        peak = std::max(peak, std::abs(s));
    }
    if (peak == 0.0) {
        return clip;
    }
    AudioClip out = clip;
    const double scale = (1.0 - kPeakEps) / peak;
    for (double& s : out.samples) {
        s *= scale;
    }
    return out;
}

AudioClip trim_silence(const AudioClip& clip, double threshold_db, int frame_len,
                       int hop_len) {
    if (threshold_db < 0.0) {
        throw ParameterError("trim threshold must be non-negative");
    }
    if (frame_len < 1 || hop_len < 1) {
        throw ParameterError("trim frame and hop must be positive");
    }
    if (clip.samples.empty()) {
        throw AllSilentError("empty clip: " + clip.source_id);
    }

    const std::size_t len = clip.samples.size();
    const auto flen = static_cast<std::size_t>(frame_len);
    const auto hop = static_cast<std::size_t>(hop_len);

    // Full frames only; the hop-grid alignment is what makes
    // trim(trim(x)) == trim(x) hold exactly.
    std::size_t n_frames = 1;
    std::size_t eff_len = std::min(flen, len);
    if (len > flen) {
        n_frames = 1 + (len - flen) / hop;
    }

    std::vector<double> power(n_frames, 0.0);
    double pmax = 0.0;
    for (std::size_t i = 0; i < n_frames; ++i) {
        const std::size_t start = i * hop;
        const std::size_t count = std::min(eff_len, len - start);
        double acc = 0.0;
        for (std::size_t j = 0; j < count; ++j) {
            const double s = clip.samples[start + j];
            acc += s * s;
        }
        power[i] = acc / static_cast<double>(count);
        pmax = std::max(pmax, power[i]);
    }

    if (pmax <= 0.0) {
        throw AllSilentError("clip has no energy: " + clip.source_id);
    }

    const double floor_power = pmax * std::pow(10.0, -threshold_db / 10.0);
    auto keep = [&](std::size_t i) { return power[i] >= floor_power; };

    std::size_t first = 0;
    while (first < n_frames && !keep(first)) {
        ++first;
    }
    std::size_t last = n_frames - 1;
    while (last > first && !keep(last)) {
        --last;
    }
    if (first >= n_frames) {
        throw AllSilentError("all frames below trim threshold: " + clip.source_id);
    }

    const std::size_t start = first * hop;
    const std::size_t end =
        (last == n_frames - 1) ? len : std::min(len, last * hop + flen);

    AudioClip out;
    out.sample_rate_hz = clip.sample_rate_hz;
    out.source_id = clip.source_id;
    out.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(start),
                       clip.samples.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

}  // namespace respire
