#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "respire/audio.hpp"
#include "respire/rng.hpp"
#include "respire/vectorize.hpp"

namespace respire {

// Class recipe grammar:
//   "tonal:FMIN-FMAX"      harmonic bursts, fundamental uniform in the band
//   "tones:F1,F2,..."      harmonic bursts, fundamental drawn from the list
//   "noise:FMIN-FMAX"      band-limited noise bursts
struct ClassRecipe {
    enum class Kind { tonal, tones, noise };
    Kind kind = Kind::tonal;
    double fmin_hz = 200.0;
    double fmax_hz = 400.0;
    std::vector<double> freqs;

    static ClassRecipe parse(const std::string& text);
};

struct SynthSpec {
    int n_per_class = 20;
    std::uint64_t seed = 42;
    int sample_rate = 22050;
    double min_dur_s = 1.0;
    double max_dur_s = 3.0;
    ClassRecipe covid;
    ClassRecipe healthy;
};

// One synthetic recording: a few enveloped bursts with randomized leading
// and trailing silences. Breath clips use fewer, longer, softer bursts than
// cough clips.
AudioClip synth_clip(const ClassRecipe& recipe, SampleKind kind, int sample_rate,
                     double duration_s, Rng& rng);

struct SynthResult {
    std::string manifest_path;
    int n_participants = 0;
};

// Writes <out_dir>/wav/*.wav plus <out_dir>/manifest.csv with one row per
// participant (breath and cough file each).
SynthResult synth_corpus(const SynthSpec& spec, const std::string& out_dir);

}  // namespace respire
