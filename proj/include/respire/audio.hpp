#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "respire/errors.hpp"

namespace respire {

// Decoded mono waveform. Immutable by convention: every operation returns a
// new clip.
struct AudioClip {
    std::vector<double> samples;  // nominal range [-1, 1]
    int sample_rate_hz = 0;
    std::string source_id;

    double duration_s() const {
        return sample_rate_hz > 0
                   ? static_cast<double>(samples.size()) / sample_rate_hz
                   : 0.0;
    }
};

// Decodes a RIFF/WAVE buffer. Accepts PCM 16/24/32-bit integer and 32-bit
// float, 1-2 channels. Stereo is mixed down by per-sample channel mean and
// integer samples are scaled by 1/2^(bits-1).
AudioClip decode_wav(std::span<const std::uint8_t> bytes, std::string source_id = {});

AudioClip read_wav(const std::string& path);

// Encodes to 16-bit PCM mono WAV (values clamped to [-1, 1]).
std::vector<std::uint8_t> encode_wav_pcm16(const AudioClip& clip);

void write_wav_pcm16(const AudioClip& clip, const std::string& path);

// Linear-interpolation resampler; output length = round(len * target/source).
// Equal rates return the input unchanged.
AudioClip resample(const AudioClip& clip, int target_rate_hz);

// Scales samples by (1 - eps)/max(|x|), eps = 1e-6. All-zero clips pass
// through unchanged.
AudioClip normalize_amplitude(const AudioClip& clip);

// Removes leading/trailing frames whose RMS power sits more than
// threshold_db below the clip's own maximum frame power. Frame decisions use
// full frames only, which makes the operation exactly idempotent. Throws
// AllSilentError when the clip carries no energy at all.
AudioClip trim_silence(const AudioClip& clip, double threshold_db = 60.0,
                       int frame_len = 2048, int hop_len = 512);

}  // namespace respire
