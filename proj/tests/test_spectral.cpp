#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "respire/features_spectral.hpp"
#include "respire/rng.hpp"

using namespace respire;

namespace {

AudioClip clip_of(std::vector<double> samples, int sr = 22050) {
    AudioClip clip;
    clip.sample_rate_hz = sr;
    clip.samples = std::move(samples);
    return clip;
}

AudioClip sine_clip(double freq, double seconds, int sr = 22050, double amp = 1.0) {
    AudioClip clip;
    clip.sample_rate_hz = sr;
    const auto n = static_cast<std::size_t>(seconds * sr);
    clip.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        clip.samples[i] =
            amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / sr);
    }
    return clip;
}

// Single-frame spectrogram with the given magnitudes on an integer-Hz grid.
Spectrogram spec_of(std::vector<std::vector<double>> frames,
                    std::vector<double> freqs, SpecKind kind = SpecKind::magnitude) {
    Spectrogram spec;
    spec.kind = kind;
    spec.sample_rate_hz = 22050;
    spec.bin_freqs_hz = std::move(freqs);
    spec.values = Matrix(frames.size(), spec.bin_freqs_hz.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        std::copy(frames[i].begin(), frames[i].end(), spec.values.row(i).begin());
    }
    return spec;
}

}  // namespace

TEST_SUITE("features_spectral") {

TEST_CASE("rmse of zero, constant and sine frames") {
    SUBCASE("all-zero frame -> 0") {
        const auto frames = frame_signal(clip_of(std::vector<double>(4096, 0.0)), 2048, 512);
        const auto out = rmse(frames);
        for (const double v : out.values.data()) {
            CHECK(v == 0.0);
        }
    }
    SUBCASE("constant frame of amplitude a -> |a|") {
        const auto frames =
            frame_signal(clip_of(std::vector<double>(2048, -0.4)), 2048, 512);
        CHECK(rmse(frames).values(0, 0) == doctest::Approx(0.4).epsilon(1e-12));
    }
    SUBCASE("full-scale sine -> 1/sqrt(2) within 1e-3") {
        const auto frames = frame_signal(sine_clip(440.0, 0.5), 2048, 512);
        const auto out = rmse(frames);
        for (std::size_t i = 0; i + 1 < out.n_frames(); ++i) {
            CHECK(out.values(i, 0) ==
                  doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
        }
    }
}

TEST_CASE("zcr on constant, alternating and zero-touching frames") {
    SUBCASE("constant positive frame -> 0") {
        const auto frames =
            frame_signal(clip_of(std::vector<double>(2048, 0.7)), 2048, 512);
        CHECK(zcr(frames).values(0, 0) == 0.0);
    }
    SUBCASE("alternating frame -> rate 1.0") {
        std::vector<double> x(2048);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = i % 2 == 0 ? 1.0 : -1.0;
        }
        const auto frames = frame_signal(clip_of(std::move(x)), 2048, 512);
        CHECK(zcr(frames).values(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("exact zero between +1 and -1 contributes half per side") {
        // frame [1, 0, -1, 1]: |1-0| + |0-(-1)| + |-1-1| = 1+1+2, x0.5 -> 2, /3
        const auto frames = frame_signal(clip_of({1.0, 0.0, -1.0, 1.0}), 4, 4);
        CHECK(zcr(frames).values(0, 0) ==
              doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("spectral_centroid degenerate and oracle cases") {
    SUBCASE("single active bin -> that bin's frequency") {
        const auto spec = spec_of({{0, 0, 3.0, 0}}, {100, 200, 300, 400});
        CHECK(spectral_centroid(spec).values(0, 0) == doctest::Approx(300.0));
    }
    SUBCASE("two equal bins -> midpoint") {
        const auto spec = spec_of({{1.0, 0, 0, 1.0}}, {100, 200, 300, 400});
        CHECK(spectral_centroid(spec).values(0, 0) == doctest::Approx(250.0));
    }
    SUBCASE("random spectrum matches the direct summation") {
        Rng rng(17);
        std::vector<double> mags(64), freqs(64);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < 64; ++k) {
            mags[k] = rng.uniform(0.0, 1.0);
            freqs[k] = static_cast<double>(k) * 10.0;
            num += mags[k] * freqs[k];
            den += mags[k];
        }
        const auto spec = spec_of({mags}, freqs);
        CHECK(spectral_centroid(spec).values(0, 0) ==
              doctest::Approx(num / den).epsilon(1e-9));
    }
    SUBCASE("all-zero frame -> 0") {
        const auto spec = spec_of({{0, 0, 0}}, {100, 200, 300});
        CHECK(spectral_centroid(spec).values(0, 0) == 0.0);
    }
}

TEST_CASE("spectral_bandwidth degenerate and oracle cases") {
    SUBCASE("single-bin spectrum -> 0") {
        const auto spec = spec_of({{0, 2.0, 0}}, {100, 200, 300});
        CHECK(spectral_bandwidth(spec).values(0, 0) == doctest::Approx(0.0));
    }
    SUBCASE("equal energy at E +- delta -> delta") {
        const auto spec = spec_of({{1.0, 0, 1.0}}, {100, 200, 300});
        CHECK(spectral_bandwidth(spec).values(0, 0) == doctest::Approx(100.0));
    }
    SUBCASE("random spectrum matches the brute-force weighted stddev") {
        Rng rng(23);
        std::vector<double> mags(64), freqs(64);
        for (std::size_t k = 0; k < 64; ++k) {
            mags[k] = rng.uniform(0.0, 1.0);
            freqs[k] = 11025.0 * static_cast<double>(k) / 64.0;
        }
        const auto spec = spec_of({mags}, freqs);
        CHECK(spectral_bandwidth(spec).values(0, 0) ==
              doctest::Approx(oracle::weighted_stddev(freqs, mags)).epsilon(1e-9));
    }
}

TEST_CASE("spectral_contrast flat spectrum and sorted-band evaluation") {
    // realistic bin grid so every octave band has bins
    std::vector<double> freqs(1025);
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        freqs[k] = 22050.0 * static_cast<double>(k) / 2048.0;
    }
    SUBCASE("flat spectrum -> zero contrast in every band") {
        const auto spec = spec_of({std::vector<double>(1025, 0.5)}, freqs);
        const auto out = spectral_contrast(spec);
        REQUIRE(out.dim() == 7);
        for (const double v : out.values.data()) {
            CHECK(std::abs(v) < 1e-12);
        }
    }
    SUBCASE("[8,1,1,1] band with alpha covering one bin -> log 8") {
        // put 8 at the very first bin of the sub-200 Hz band, 1 elsewhere
        std::vector<double> mags(1025, 1.0);
        mags[0] = 8.0;
        SpectralParams params;
        params.contrast_alpha = 1e-4;  // top fraction rounds down to one bin
        const auto spec = spec_of({mags}, freqs);
        const auto out = spectral_contrast(spec, params);
        CHECK(out.values(0, 0) == doctest::Approx(std::log(8.0)).epsilon(1e-12));
        for (std::size_t b = 1; b < 7; ++b) {
            CHECK(std::abs(out.values(0, b)) < 1e-12);
        }
    }
    SUBCASE("a band without bins raises ParameterError") {
        const auto spec = spec_of({{1.0, 1.0}}, {0.0, 11025.0});
        CHECK_THROWS_AS(spectral_contrast(spec), ParameterError);
    }
}

TEST_CASE("spectral_flatness bounds and synthetic signals") {
    SUBCASE("flat power spectrum -> 1") {
        const auto spec =
            spec_of({std::vector<double>(128, 0.25)}, std::vector<double>(128, 0.0),
                    SpecKind::power);
        CHECK(spectral_flatness(spec).values(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("single-bin spectrum -> near 0") {
        std::vector<double> p(128, 0.0);
        p[5] = 4.0;
        const auto spec = spec_of({p}, std::vector<double>(128, 0.0), SpecKind::power);
        CHECK(spectral_flatness(spec).values(0, 0) < 0.01);
    }
    SUBCASE("white noise median > 0.3, sine median < 0.05") {
        Rng rng(31);
        AudioClip noise;
        noise.sample_rate_hz = 22050;
        noise.samples.resize(22050);
        for (double& s : noise.samples) {
            s = rng.uniform(-1.0, 1.0);
        }
        auto median_flatness = [](const AudioClip& clip) {
            const auto power = to_power(stft(frame_signal(clip, 2048, 512)));
            auto values = spectral_flatness(power).values.data();
            std::sort(values.begin(), values.end());
            return values[values.size() / 2];
        };
        CHECK(median_flatness(noise) > 0.3);
        CHECK(median_flatness(sine_clip(440.0, 1.0)) < 0.05);
    }
}

TEST_CASE("spectral_flux stationary, step and oracle cases") {
    SUBCASE("stationary tone -> flux ~ 0 beyond the first frame") {
        const auto spec = stft(frame_signal(sine_clip(440.0, 0.5), 2048, 512));
        const auto out = spectral_flux(spec);
        for (std::size_t i = 1; i + 1 < out.n_frames(); ++i) {
            CHECK(out.values(i, 0) < 1e-6);
        }
    }
    SUBCASE("silence -> tone boundary produces the maximum flux") {
        AudioClip clip = sine_clip(440.0, 1.0);
        for (std::size_t i = 0; i < clip.samples.size() / 2; ++i) {
            clip.samples[i] = 0.0;
        }
        const auto spec = stft(frame_signal(clip, 2048, 512));
        const auto out = spectral_flux(spec);
        std::size_t argmax = 0;
        for (std::size_t i = 1; i < out.n_frames(); ++i) {
            if (out.values(i, 0) > out.values(argmax, 0)) {
                argmax = i;
            }
        }
        CHECK(out.values(argmax, 0) > 0.0);
        // boundary frame index: the first frame containing the tone onset
        const std::size_t onset = clip.samples.size() / 2;
        CHECK(argmax >= (onset - 2048) / 512);
        CHECK(argmax <= onset / 512 + 1);
    }
    SUBCASE("random spectrogram matches the direct summation") {
        Rng rng(41);
        std::vector<std::vector<double>> frames(3, std::vector<double>(32));
        for (auto& f : frames) {
            for (double& v : f) {
                v = rng.uniform(0.0, 1.0);
            }
        }
        const auto spec = spec_of(frames, std::vector<double>(32, 0.0));
        const auto out = spectral_flux(spec);
        CHECK(out.values(0, 0) == 0.0);
        for (std::size_t n = 1; n < 3; ++n) {
            double s_prev = 0.0, s_cur = 0.0;
            for (std::size_t k = 0; k < 32; ++k) {
                s_prev += frames[n - 1][k];
                s_cur += frames[n][k];
            }
            double expect = 0.0;
            for (std::size_t k = 0; k < 32; ++k) {
                const double d = frames[n][k] / s_cur - frames[n - 1][k] / s_prev;
                expect += d * d;
            }
            CHECK(out.values(n, 0) == doctest::Approx(expect).epsilon(1e-9));
        }
    }
    SUBCASE("single frame -> one zero") {
        const auto spec = spec_of({{1.0, 2.0}}, {0.0, 10.0});
        const auto out = spectral_flux(spec);
        REQUIRE(out.n_frames() == 1);
        CHECK(out.values(0, 0) == 0.0);
    }
}

TEST_CASE("spectral_rolloff forced and hand-evaluated cases") {
    SUBCASE("S = 1 -> highest bin with energy") {
        const auto spec = spec_of({{1.0, 2.0, 3.0, 0.0}}, {100, 200, 300, 400});
        SpectralParams params;
        params.rolloff_fraction = 1.0;
        CHECK(spectral_rolloff(spec, params).values(0, 0) == doctest::Approx(300.0));
    }
    SUBCASE("single-bin spectrum -> that bin for any S") {
        const auto spec = spec_of({{0.0, 5.0, 0.0}}, {100, 200, 300});
        for (const double s : {0.1, 0.5, 0.85, 1.0}) {
            SpectralParams params;
            params.rolloff_fraction = s;
            CHECK(spectral_rolloff(spec, params).values(0, 0) ==
                  doctest::Approx(200.0));
        }
    }
    SUBCASE("[1,1,1,1] with S = 0.5 -> second bin") {
        const auto spec = spec_of({{1.0, 1.0, 1.0, 1.0}}, {100, 200, 300, 400});
        SpectralParams params;
        params.rolloff_fraction = 0.5;
        CHECK(spectral_rolloff(spec, params).values(0, 0) == doctest::Approx(200.0));
    }
    SUBCASE("monotone non-decreasing in S") {
        Rng rng(55);
        std::vector<double> mags(64), freqs(64);
        for (std::size_t k = 0; k < 64; ++k) {
            mags[k] = rng.uniform(0.0, 1.0);
            freqs[k] = static_cast<double>(k + 1) * 50.0;
        }
        const auto spec = spec_of({mags}, freqs);
        double prev = 0.0;
        for (double s = 0.05; s <= 1.0; s += 0.05) {
            SpectralParams params;
            params.rolloff_fraction = s;
            const double r = spectral_rolloff(spec, params).values(0, 0);
            CHECK(r >= prev);
            prev = r;
        }
    }
}

TEST_CASE("normalized spectral features are amplitude-scale invariant") {
    const AudioClip one = sine_clip(523.25, 0.6, 22050, 0.08);
    AudioClip ten = one;
    for (double& s : ten.samples) {
        s *= 10.0;
    }
    const auto mag1 = stft(frame_signal(one, 2048, 512));
    const auto mag10 = stft(frame_signal(ten, 2048, 512));

    auto check_equal = [](const FeatureSeries& a, const FeatureSeries& b) {
        REQUIRE(a.values.data().size() == b.values.data().size());
        for (std::size_t i = 0; i < a.values.data().size(); ++i) {
            CHECK(a.values.data()[i] ==
                  doctest::Approx(b.values.data()[i]).epsilon(1e-6).scale(1.0));
        }
    };
    check_equal(spectral_centroid(mag1), spectral_centroid(mag10));
    check_equal(spectral_bandwidth(mag1), spectral_bandwidth(mag10));
    check_equal(spectral_rolloff(mag1), spectral_rolloff(mag10));
    check_equal(spectral_contrast(mag1), spectral_contrast(mag10));
    check_equal(spectral_flatness(to_power(mag1)), spectral_flatness(to_power(mag10)));
}

TEST_CASE("every spectral feature stays finite on all-zero frames") {
    const auto frames = frame_signal(clip_of(std::vector<double>(4096, 0.0)), 2048, 512);
    const auto mag = stft(frames);
    const auto power = to_power(mag);
    for (const auto& series :
         {rmse(frames), zcr(frames), spectral_centroid(mag), spectral_bandwidth(mag),
          spectral_contrast(mag), spectral_flatness(power), spectral_flux(mag),
          spectral_rolloff(mag)}) {
        for (const double v : series.values.data()) {
            CHECK(std::isfinite(v));
        }
    }
    // documented zero-energy fallbacks
    CHECK(spectral_centroid(mag).values(0, 0) == 0.0);
    CHECK(spectral_flatness(power).values(0, 0) == doctest::Approx(1.0));
    CHECK(spectral_contrast(mag).values(0, 0) == doctest::Approx(0.0));
}

}  // TEST_SUITE
