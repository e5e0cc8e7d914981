#pragma once

#include "respire/dsp.hpp"
#include "respire/features_spectral.hpp"
#include "respire/matrix.hpp"

namespace respire {

enum class ChromaNorm { l2, l1, none };

// 12 pitch classes per frame, C = class 0.
struct ChromaMatrix {
    Matrix values;  // n_frames x 12
    ChromaNorm norm = ChromaNorm::l2;

    std::size_t n_frames() const { return values.rows(); }
};

// n_frames x n_mfcc cepstral coefficients; order 0 = base, 1 = velocity,
// 2 = acceleration.
struct CepstralMatrix {
    Matrix values;
    int order = 0;

    std::size_t n_frames() const { return values.rows(); }
    std::size_t n_coeffs() const { return values.cols(); }
};

struct MfccParams {
    int n_mfcc = 20;
    int n_mels = 40;
    double fmin_hz = 0.0;
    double fmax_hz = 0.0;  // 0 = Nyquist
};

// Power STFT -> mel filterbank -> log (floored at 1e-10) -> DCT-II, keeping
// the first n_mfcc coefficients.
CepstralMatrix mfcc(const AudioClip& clip, int frame_len = 2048, int hop_len = 512,
                    const MfccParams& params = {});

// Same pipeline on an already-computed power spectrogram.
CepstralMatrix mfcc_from_power(const Spectrogram& power, const MfccParams& params = {});

// Regression delta over +-half_width frames with replicated edges; short
// inputs shrink the window to (n_frames-1)/2, minimum 1. order 2 applies the
// regression twice.
CepstralMatrix delta(const CepstralMatrix& cep, int order, int half_width = 4);

// STFT power folded to pitch classes by nearest semitone (bins below
// 27.5 Hz ignored), l2-normalized per frame.
ChromaMatrix chroma_stft(const AudioClip& clip, int frame_len = 2048, int hop_len = 512);
ChromaMatrix chroma_stft_from_power(const Spectrogram& power);

// CQT magnitudes folded across octaves (bin j -> class j mod 12, fmin = C1),
// l2-normalized per frame.
ChromaMatrix chroma_cqt(const AudioClip& clip, const CqtParams& params = {},
                        int frame_len = 2048, int hop_len = 512);
ChromaMatrix chroma_from_cqt(const Spectrogram& cqt_mag, int bins_per_octave);

// Energy-normalized chroma: l1 normalization, 0.05/0.1/0.2/0.4 quantization,
// Hann smoothing over smooth_len frames, then l2 normalization. The frame
// count is preserved.
ChromaMatrix chroma_cens(const AudioClip& clip, int smooth_len = 41,
                         const CqtParams& params = {}, int frame_len = 2048,
                         int hop_len = 512);
ChromaMatrix cens_from_chroma(const ChromaMatrix& chroma, int smooth_len = 41);

// 6-D projection of l1-normalized chroma onto the circles of fifths, minor
// thirds, and major thirds: [sin5, cos5, sin_m3, cos_m3, sin_M3, cos_M3].
FeatureSeries tonnetz(const ChromaMatrix& chroma);

}  // namespace respire
