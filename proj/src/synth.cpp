#include "respire/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace respire {

namespace {

namespace fs = std::filesystem;

std::vector<double> split_freqs(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string item =
            text.substr(pos, comma == std::string::npos ? std::string::npos
                                                        : comma - pos);
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ParameterError("bad frequency '" + item + "' in recipe");
        }
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

// Adds one harmonic burst (5 partials, 1/h amplitudes) into buf.
void add_tonal_burst(std::vector<double>& buf, std::size_t start, std::size_t len,
                     double f0, double gain, int sample_rate, Rng& rng) {
    const double two_pi = 2.0 * std::numbers::pi;
    double phases[5];
    for (double& p : phases) {
        p = rng.uniform(0.0, two_pi);
    }
    const double nyquist = sample_rate / 2.0;
    for (std::size_t i = 0; i < len && start + i < buf.size(); ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        const double env =
            0.5 - 0.5 * std::cos(two_pi * static_cast<double>(i) / static_cast<double>(len));
        double v = 0.0;
        for (int h = 1; h <= 5; ++h) {
            const double fh = f0 * h;
            if (fh >= nyquist) {
                break;
            }
            v += std::sin(two_pi * fh * t + phases[h - 1]) / h;
        }
        buf[start + i] += gain * env * v / 1.5;
    }
}

// Band-limited noise as a sum of 64 random sinusoids inside the band.
void add_noise_burst(std::vector<double>& buf, std::size_t start, std::size_t len,
                     double fmin, double fmax, double gain, int sample_rate,
                     Rng& rng) {
    const double two_pi = 2.0 * std::numbers::pi;
    constexpr int n_partials = 64;
    double freqs[n_partials];
    double phases[n_partials];
    for (int p = 0; p < n_partials; ++p) {
        freqs[p] = rng.uniform(fmin, fmax);
        phases[p] = rng.uniform(0.0, two_pi);
    }
    const double scale = gain / std::sqrt(static_cast<double>(n_partials) / 2.0);
    for (std::size_t i = 0; i < len && start + i < buf.size(); ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        const double env =
            0.5 - 0.5 * std::cos(two_pi * static_cast<double>(i) / static_cast<double>(len));
        double v = 0.0;
        for (int p = 0; p < n_partials; ++p) {
            v += std::sin(two_pi * freqs[p] * t + phases[p]);
        }
        buf[start + i] += scale * env * v;
    }
}

}  // namespace

ClassRecipe ClassRecipe::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ParameterError("recipe '" + text + "' lacks a kind prefix");
    }
    const std::string kind = text.substr(0, colon);
    const std::string args = text.substr(colon + 1);

    ClassRecipe recipe;
    if (kind == "tones") {
        recipe.kind = Kind::tones;
        recipe.freqs = split_freqs(args);
        if (recipe.freqs.empty()) {
            throw ParameterError("recipe '" + text + "' lists no frequencies");
        }
        return recipe;
    }
    if (kind == "tonal") {
        recipe.kind = Kind::tonal;
    } else if (kind == "noise") {
        recipe.kind = Kind::noise;
    } else {
        throw ParameterError("unknown recipe kind '" + kind + "'");
    }
    const auto dash = args.find('-');
    if (dash == std::string::npos) {
        throw ParameterError("recipe '" + text + "' needs FMIN-FMAX");
    }
    try {
        recipe.fmin_hz = std::stod(args.substr(0, dash));
        recipe.fmax_hz = std::stod(args.substr(dash + 1));
    } catch (const std::exception&) {
        throw ParameterError("bad band in recipe '" + text + "'");
    }
    if (recipe.fmin_hz <= 0.0 || recipe.fmax_hz <= recipe.fmin_hz) {
        throw ParameterError("recipe band must satisfy 0 < fmin < fmax");
    }
    return recipe;
}

AudioClip synth_clip(const ClassRecipe& recipe, SampleKind kind, int sample_rate,
                     double duration_s, Rng& rng) {
    const auto len = static_cast<std::size_t>(duration_s * sample_rate);
    std::vector<double> buf(len, 0.0);

    const double lead_s = rng.uniform(0.1, 0.4);
    const double trail_s = rng.uniform(0.1, 0.4);
    const auto lead = static_cast<std::size_t>(lead_s * sample_rate);
    const auto trail = static_cast<std::size_t>(trail_s * sample_rate);
    const std::size_t active = len > lead + trail ? len - lead - trail : len / 2;

    int n_bursts;
    double burst_min_s, burst_max_s, gain;
    if (kind == SampleKind::breath) {
        n_bursts = 1 + static_cast<int>(rng.below(2));
        burst_min_s = 0.3;
        burst_max_s = 0.8;
        gain = 0.5;
    } else {
        n_bursts = 2 + static_cast<int>(rng.below(4));
        burst_min_s = 0.08;
        burst_max_s = 0.25;
        gain = 0.9;
    }

    for (int b = 0; b < n_bursts; ++b) {
        const double dur = rng.uniform(burst_min_s, burst_max_s);
        auto burst_len = static_cast<std::size_t>(dur * sample_rate);
        burst_len = std::min(burst_len, active);
        const std::size_t slack = active > burst_len ? active - burst_len : 0;
        const std::size_t start = lead + (slack > 0 ? rng.below(slack) : 0);
        const double g = gain * rng.uniform(0.7, 1.0);

        if (recipe.kind == ClassRecipe::Kind::noise) {
            add_noise_burst(buf, start, burst_len, recipe.fmin_hz, recipe.fmax_hz, g,
                            sample_rate, rng);
        } else {
            const double f0 = recipe.kind == ClassRecipe::Kind::tones
                                  ? recipe.freqs[rng.below(recipe.freqs.size())]
                                  : rng.uniform(recipe.fmin_hz, recipe.fmax_hz);
            add_tonal_burst(buf, start, burst_len, f0, g, sample_rate, rng);
        }
    }

    // Faint wideband floor so spectral statistics stay realistic, kept well
    // under the 60 dB trim threshold.
    for (std::size_t i = lead; i < lead + active && i < buf.size(); ++i) {
        buf[i] += 0.002 * (rng.next_double() * 2.0 - 1.0);
    }

    double peak = 0.0;
    for (const double v : buf) {
        peak = std::max(peak, std::abs(v));
    }
    if (peak > 0.9) {
        for (double& v : buf) {
            v *= 0.9 / peak;
        }
    }

    AudioClip clip;
    clip.sample_rate_hz = sample_rate;
    clip.samples = std::move(buf);
    return clip;
}

SynthResult synth_corpus(const SynthSpec& spec, const std::string& out_dir) {
    if (spec.n_per_class < 1) {
        throw ParameterError("synth corpus needs n_per_class >= 1");
    }
    const fs::path root(out_dir);
    fs::create_directories(root / "wav");

    std::ofstream manifest(root / "manifest.csv");
    if (!manifest) {
        throw IoError("cannot write manifest under " + out_dir);
    }
    manifest << "participant_id,breath_path,cough_path,label\n";

    int participant = 0;
    for (const int label : {1, 0}) {
        const ClassRecipe& recipe = label ? spec.covid : spec.healthy;
        for (int i = 0; i < spec.n_per_class; ++i, ++participant) {
            char id[16];
            std::snprintf(id, sizeof id, "p%04d", participant);

            for (const SampleKind kind : {SampleKind::breath, SampleKind::cough}) {
                Rng rng(Rng::derive(spec.seed,
                                    (static_cast<std::uint64_t>(participant) << 1) |
                                        (kind == SampleKind::cough ? 1u : 0u)));
                const double dur = rng.uniform(spec.min_dur_s, spec.max_dur_s);
                AudioClip clip = synth_clip(recipe, kind, spec.sample_rate, dur, rng);
                const std::string name =
                    std::string(id) +
                    (kind == SampleKind::breath ? "_breath.wav" : "_cough.wav");
                write_wav_pcm16(clip, (root / "wav" / name).string());
            }
            manifest << id << ",wav/" << id << "_breath.wav,wav/" << id
                     << "_cough.wav," << label_name(label) << "\n";
        }
    }

    SynthResult result;
    result.manifest_path = (root / "manifest.csv").string();
    result.n_participants = participant;
    return result;
}

}  // namespace respire
