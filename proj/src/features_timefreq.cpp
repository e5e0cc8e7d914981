#include "respire/features_timefreq.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace respire {

namespace {

constexpr double kLogFloor = 1e-10;
constexpr double kChromaMinHz = 27.5;  // A0

void l2_normalize_rows(Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = m.row(i);
        double norm = 0.0;
        for (const double v : row) {
            norm += v * v;
        }
        if (norm <= 0.0) {
            continue;
        }
        norm = std::sqrt(norm);
        for (double& v : row) {
            v /= norm;
        }
    }
}

int pitch_class_of_hz(double hz) {
    const double midi = 69.0 + 12.0 * std::log2(hz / 440.0);
    const auto note = static_cast<long>(std::llround(midi));
    return static_cast<int>(((note % 12) + 12) % 12);
}

}  // namespace

CepstralMatrix mfcc_from_power(const Spectrogram& power, const MfccParams& params) {
    if (params.n_mfcc < 1 || params.n_mels < params.n_mfcc) {
        throw ParameterError("mfcc needs 1 <= n_mfcc <= n_mels");
    }
    const double fmax =
        params.fmax_hz > 0.0 ? params.fmax_hz : power.sample_rate_hz / 2.0;
    const MelFilterbank fb =
        mel_filterbank(params.n_mels, static_cast<int>(power.n_bins()),
                       power.sample_rate_hz, params.fmin_hz, fmax);
    const Matrix mel = apply_filterbank(fb, power);

    CepstralMatrix out;
    out.order = 0;
    out.values = Matrix(mel.rows(), static_cast<std::size_t>(params.n_mfcc));
    std::vector<double> log_mel(mel.cols());
    for (std::size_t i = 0; i < mel.rows(); ++i) {
        const auto row = mel.row(i);
        for (std::size_t m = 0; m < row.size(); ++m) {
            log_mel[m] = std::log(std::max(row[m], kLogFloor));
        }
        const auto coeffs = dct_ii(log_mel, params.n_mfcc);
        std::copy(coeffs.begin(), coeffs.end(), out.values.row(i).begin());
    }
    return out;
}

CepstralMatrix mfcc(const AudioClip& clip, int frame_len, int hop_len,
                    const MfccParams& params) {
    const FrameMatrix frames = frame_signal(clip, frame_len, hop_len);
    return mfcc_from_power(to_power(stft(frames)), params);
}

CepstralMatrix delta(const CepstralMatrix& cep, int order, int half_width) {
    if (order != 1 && order != 2) {
        throw ParameterError("delta order must be 1 or 2");
    }
    if (cep.n_frames() == 0) {
        throw EmptyInputError("cannot differentiate an empty cepstral matrix");
    }
    if (order == 2) {
        return delta(delta(cep, 1, half_width), 1, half_width);
    }

    const auto n = static_cast<std::ptrdiff_t>(cep.n_frames());
    const int m_max = std::max(
        1, std::min(half_width, static_cast<int>((cep.n_frames() - 1) / 2)));
    double denom = 0.0;
    for (int m = 1; m <= m_max; ++m) {
        denom += static_cast<double>(m) * m;
    }
    denom *= 2.0;

    CepstralMatrix out;
    out.order = cep.order + 1;
    out.values = Matrix(cep.n_frames(), cep.n_coeffs());
    for (std::ptrdiff_t t = 0; t < n; ++t) {
        for (std::size_t c = 0; c < cep.n_coeffs(); ++c) {
            double acc = 0.0;
            for (int m = 1; m <= m_max; ++m) {
                const auto ahead = static_cast<std::size_t>(
                    std::clamp<std::ptrdiff_t>(t + m, 0, n - 1));
                const auto behind = static_cast<std::size_t>(
                    std::clamp<std::ptrdiff_t>(t - m, 0, n - 1));
                acc += m * (cep.values(ahead, c) - cep.values(behind, c));
            }
            out.values(static_cast<std::size_t>(t), c) = acc / denom;
        }
    }
    return out;
}

ChromaMatrix chroma_stft_from_power(const Spectrogram& power) {
    ChromaMatrix out;
    out.norm = ChromaNorm::l2;
    out.values = Matrix(power.n_frames(), 12);
    std::vector<int> bin_class(power.n_bins(), -1);
    for (std::size_t k = 0; k < power.n_bins(); ++k) {
        if (power.bin_freqs_hz[k] >= kChromaMinHz) {
            bin_class[k] = pitch_class_of_hz(power.bin_freqs_hz[k]);
        }
    }
    for (std::size_t i = 0; i < power.n_frames(); ++i) {
        const auto row = power.values.row(i);
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (bin_class[k] >= 0) {
                out.values(i, static_cast<std::size_t>(bin_class[k])) += row[k];
            }
        }
    }
    l2_normalize_rows(out.values);
    return out;
}

ChromaMatrix chroma_stft(const AudioClip& clip, int frame_len, int hop_len) {
    const FrameMatrix frames = frame_signal(clip, frame_len, hop_len);
    return chroma_stft_from_power(to_power(stft(frames)));
}

ChromaMatrix chroma_from_cqt(const Spectrogram& cqt_mag, int bins_per_octave) {
    if (bins_per_octave != 12) {
        throw ParameterError("chroma folding requires 12 bins per octave");
    }
    ChromaMatrix out;
    out.norm = ChromaNorm::l2;
    out.values = Matrix(cqt_mag.n_frames(), 12);
    for (std::size_t i = 0; i < cqt_mag.n_frames(); ++i) {
        const auto row = cqt_mag.values.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            out.values(i, j % 12) += row[j];
        }
    }
    l2_normalize_rows(out.values);
    return out;
}

ChromaMatrix chroma_cqt(const AudioClip& clip, const CqtParams& params, int frame_len,
                        int hop_len) {
    return chroma_from_cqt(cqt(clip, params, frame_len, hop_len),
                           params.bins_per_octave);
}

ChromaMatrix cens_from_chroma(const ChromaMatrix& chroma, int smooth_len) {
    if (smooth_len < 1) {
        throw ParameterError("cens smoothing length must be >= 1");
    }
    const std::size_t n = chroma.n_frames();
    Matrix quantized(n, 12);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = chroma.values.row(i);
        double total = 0.0;
        for (const double v : row) {
            total += std::abs(v);
        }
        for (std::size_t c = 0; c < 12; ++c) {
            const double v = total > 0.0 ? std::abs(row[c]) / total : 0.0;
            double q = 0.0;
            if (v >= 0.4) {
                q = 4.0;
            } else if (v >= 0.2) {
                q = 3.0;
            } else if (v >= 0.1) {
                q = 2.0;
            } else if (v >= 0.05) {
                q = 1.0;
            }
            quantized(i, c) = q;
        }
    }

    const std::vector<double> win = hann_symmetric(smooth_len);
    const std::ptrdiff_t half = smooth_len / 2;
    ChromaMatrix out;
    out.norm = ChromaNorm::l2;
    out.values = Matrix(n, 12);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 12; ++c) {
            double acc = 0.0;
            for (std::ptrdiff_t m = 0; m < smooth_len; ++m) {
                const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(i) + m - half;
                if (t < 0 || t >= static_cast<std::ptrdiff_t>(n)) {
                    continue;
                }
                acc += win[static_cast<std::size_t>(m)] *
                       quantized(static_cast<std::size_t>(t), c);
            }
            out.values(i, c) = acc;
        }
    }
    l2_normalize_rows(out.values);
    return out;
}

ChromaMatrix chroma_cens(const AudioClip& clip, int smooth_len, const CqtParams& params,
                         int frame_len, int hop_len) {
    return cens_from_chroma(chroma_cqt(clip, params, frame_len, hop_len), smooth_len);
}

FeatureSeries tonnetz(const ChromaMatrix& chroma) {
    // Angles per pitch class step: fifths 7pi/6, minor thirds 3pi/2,
    // major thirds 2pi/3; unit radii.
    const double step[3] = {7.0 * std::numbers::pi / 6.0,
                            3.0 * std::numbers::pi / 2.0,
                            2.0 * std::numbers::pi / 3.0};
    double basis[6][12];
    for (int a = 0; a < 3; ++a) {
        for (int p = 0; p < 12; ++p) {
            basis[2 * a][p] = std::sin(step[a] * p);
            basis[2 * a + 1][p] = std::cos(step[a] * p);
        }
    }

    FeatureSeries out{"tn", Matrix(chroma.n_frames(), 6)};
    for (std::size_t i = 0; i < chroma.n_frames(); ++i) {
        const auto row = chroma.values.row(i);
        double total = 0.0;
        for (const double v : row) {
            total += std::abs(v);
        }
        if (total <= 0.0) {
            continue;
        }
        for (int d = 0; d < 6; ++d) {
            double acc = 0.0;
            for (int p = 0; p < 12; ++p) {
                acc += basis[d][p] * row[static_cast<std::size_t>(p)] / total;
            }
            out.values(i, static_cast<std::size_t>(d)) = acc;
        }
    }
    return out;
}

}  // namespace respire
