#pragma once

#include <string>

#include "respire/dsp.hpp"
#include "respire/matrix.hpp"

namespace respire {

// Per-frame values for one named feature; values is n_frames x feature_dim.
struct FeatureSeries {
    std::string name;
    Matrix values;

    std::size_t n_frames() const { return values.rows(); }
    std::size_t dim() const { return values.cols(); }
};

struct SpectralParams {
    double rolloff_fraction = 0.85;  // S in (0, 1]
    int n_contrast_bands = 6;        // octave subbands above contrast_fmin_hz
    double contrast_fmin_hz = 200.0;
    double contrast_alpha = 0.02;    // peak/valley neighborhood fraction
};

// Loudness: per-frame root mean square of the samples.
FeatureSeries rmse(const FrameMatrix& frames);

// Sign-change rate per frame, normalized to [0, 1] by frame_len - 1.
// sign(0) = 0, so a crossing through an exact zero counts 1/2 per side.
FeatureSeries zcr(const FrameMatrix& frames);

// Magnitude-weighted mean frequency; zero-energy frames yield 0.
FeatureSeries spectral_centroid(const Spectrogram& mag);

// Magnitude-weighted standard deviation around the centroid.
FeatureSeries spectral_bandwidth(const Spectrogram& mag);

// Log peak-to-valley difference per subband; n_contrast_bands octave bands
// above contrast_fmin_hz plus the residual band below it.
FeatureSeries spectral_contrast(const Spectrogram& mag,
                                const SpectralParams& params = {});

// Geometric over arithmetic mean of the power spectrum, in [0, 1]; bins are
// floored at 1e-10 first, so all-zero frames come out as 1.
FeatureSeries spectral_flatness(const Spectrogram& power);

// Sum of squared differences between consecutive l1-normalized magnitude
// frames; the first frame is 0 by definition.
FeatureSeries spectral_flux(const Spectrogram& mag);

// Lowest frequency below which at least rolloff_fraction of the summed
// magnitude lies; zero-energy frames yield 0.
FeatureSeries spectral_rolloff(const Spectrogram& mag,
                               const SpectralParams& params = {});

}  // namespace respire
