#include "respire/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace respire {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

// In-place iterative radix-2 Cooley-Tukey; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -kTwoPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

}  // namespace

FrameMatrix frame_signal(const AudioClip& clip, int frame_len, int hop_len) {
    if (frame_len < 1 || hop_len < 1) {
        throw ParameterError("frame_len and hop_len must be positive");
    }
    if (frame_len < hop_len) {
        throw ParameterError("frame_len must be >= hop_len");
    }
    if (clip.samples.empty()) {
        throw EmptyInputError("cannot frame an empty clip: " + clip.source_id);
    }

    const std::size_t len = clip.samples.size();
    const auto flen = static_cast<std::size_t>(frame_len);
    const auto hop = static_cast<std::size_t>(hop_len);
    const std::size_t n_frames = len >= flen ? 1 + (len - flen) / hop : 1;

    FrameMatrix out;
    out.frame_len = frame_len;
    out.hop_len = hop_len;
    out.sample_rate_hz = clip.sample_rate_hz;
    out.frames = Matrix(n_frames, flen);
    for (std::size_t i = 0; i < n_frames; ++i) {
        const std::size_t start = i * hop;
        const std::size_t count = std::min(flen, len - start);
        auto row = out.frames.row(i);
        std::copy_n(clip.samples.begin() + static_cast<std::ptrdiff_t>(start), count,
                    row.begin());
    }
    return out;
}

std::vector<double> hann_periodic(int n) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(kTwoPi * i / n);
    }
    return w;
}

std::vector<double> hann_symmetric(int n) {
    std::vector<double> w(static_cast<std::size_t>(n), 1.0);
    if (n < 2) {
        return w;
    }
    for (int i = 0; i < n; ++i) {
        w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(kTwoPi * i / (n - 1));
    }
    return w;
}

std::vector<std::complex<double>> dft(std::span<const double> frame) {
    if (frame.empty()) {
        throw EmptyInputError("cannot transform an empty frame");
    }
    const std::size_t n = next_pow2(frame.size());
    std::vector<std::complex<double>> buf(n, {0.0, 0.0});
    for (std::size_t i = 0; i < frame.size(); ++i) {
        buf[i] = {frame[i], 0.0};
    }
    fft_inplace(buf);
    buf.resize(n / 2 + 1);
    return buf;
}

Spectrogram stft(const FrameMatrix& frames, Window window) {
    (void)window;  // hann is the only supported shape
    const auto flen = static_cast<std::size_t>(frames.frame_len);
    const std::size_t padded = next_pow2(flen);
    const std::size_t n_bins = padded / 2 + 1;
    const std::vector<double> win = hann_periodic(frames.frame_len);

    Spectrogram out;
    out.kind = SpecKind::magnitude;
    out.sample_rate_hz = frames.sample_rate_hz;
    out.values = Matrix(frames.n_frames(), n_bins);
    out.bin_freqs_hz.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) {
        out.bin_freqs_hz[k] = static_cast<double>(k) * frames.sample_rate_hz /
                              static_cast<double>(padded);
    }

    std::vector<double> windowed(flen);
    for (std::size_t i = 0; i < frames.n_frames(); ++i) {
        const auto row = frames.frames.row(i);
        for (std::size_t j = 0; j < flen; ++j) {
            windowed[j] = row[j] * win[j];
        }
        const auto bins = dft(windowed);
        for (std::size_t k = 0; k < n_bins; ++k) {
            out.values(i, k) = std::abs(bins[k]);
        }
    }
    return out;
}

Spectrogram to_power(const Spectrogram& spec) {
    Spectrogram out = spec;
    out.kind = SpecKind::power;
    for (double& v : out.values.data()) {
        v *= v;
    }
    return out;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank mel_filterbank(int n_mels, int n_bins, int sample_rate_hz,
                             double fmin_hz, double fmax_hz) {
    if (n_mels < 1 || n_bins < 2) {
        throw ParameterError("mel filterbank needs n_mels >= 1 and n_bins >= 2");
    }
    const double nyquist = sample_rate_hz / 2.0;
    if (fmin_hz < 0.0 || fmin_hz >= fmax_hz || fmax_hz > nyquist) {
        throw ParameterError("invalid mel range [" + std::to_string(fmin_hz) + ", " +
                             std::to_string(fmax_hz) + "]");
    }

    const double mel_lo = hz_to_mel(fmin_hz);
    const double mel_hi = hz_to_mel(fmax_hz);
    std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                          (n_mels + 1));
    }

    // STFT bin spacing for a frame of 2*(n_bins-1) samples.
    const double bin_hz = nyquist / static_cast<double>(n_bins - 1);

    MelFilterbank fb;
    fb.weights = Matrix(static_cast<std::size_t>(n_mels), static_cast<std::size_t>(n_bins));
    fb.center_freqs_hz.assign(edges.begin() + 1, edges.end() - 1);
    for (int m = 0; m < n_mels; ++m) {
        const double lower = edges[static_cast<std::size_t>(m)];
        const double center = edges[static_cast<std::size_t>(m) + 1];
        const double upper = edges[static_cast<std::size_t>(m) + 2];
        double row_sum = 0.0;
        for (int k = 0; k < n_bins; ++k) {
            const double f = k * bin_hz;
            double w = 0.0;
            if (f > lower && f < center) {
                w = (f - lower) / (center - lower);
            } else if (f >= center && f < upper) {
                w = (upper - f) / (upper - center);
            }
            fb.weights(static_cast<std::size_t>(m), static_cast<std::size_t>(k)) = w;
            row_sum += w;
        }
        if (row_sum <= 0.0) {
            throw ParameterError("mel band " + std::to_string(m) +
                                 " covers no spectrogram bins");
        }
    }
    return fb;
}

Matrix apply_filterbank(const MelFilterbank& fb, const Spectrogram& power) {
    const std::size_t n_mels = fb.weights.rows();
    const std::size_t n_bins = fb.weights.cols();
    if (n_bins != power.n_bins()) {
        throw ParameterError("filterbank/spectrogram bin mismatch");
    }
    Matrix out(power.n_frames(), n_mels);
    for (std::size_t i = 0; i < power.n_frames(); ++i) {
        const auto row = power.values.row(i);
        for (std::size_t m = 0; m < n_mels; ++m) {
            const auto w = fb.weights.row(m);
            double acc = 0.0;
            for (std::size_t k = 0; k < n_bins; ++k) {
                acc += w[k] * row[k];
            }
            out(i, m) = acc;
        }
    }
    return out;
}

std::vector<double> dct_ii(std::span<const double> input, int n_out) {
    const std::size_t k_in = input.size();
    if (k_in == 0) {
        throw EmptyInputError("cannot transform an empty vector");
    }
    if (n_out < 1 || static_cast<std::size_t>(n_out) > k_in) {
        throw ParameterError("dct_ii output size out of range");
    }
    std::vector<double> out(static_cast<std::size_t>(n_out));
    const double scale0 = std::sqrt(1.0 / static_cast<double>(k_in));
    const double scale = std::sqrt(2.0 / static_cast<double>(k_in));
    for (int n = 0; n < n_out; ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < k_in; ++k) {
            acc += input[k] * std::cos(std::numbers::pi * n *
                                       (static_cast<double>(k) + 0.5) /
                                       static_cast<double>(k_in));
        }
        out[static_cast<std::size_t>(n)] = acc * (n == 0 ? scale0 : scale);
    }
    return out;
}

double cqt_q_factor(int bins_per_octave) {
    return 1.0 / (std::pow(2.0, 1.0 / bins_per_octave) - 1.0);
}

Spectrogram cqt(const AudioClip& clip, const CqtParams& params, int frame_len,
                int hop_len) {
    if (params.bins_per_octave < 1 || params.n_octaves < 1 || params.fmin_hz <= 0.0) {
        throw ParameterError("invalid CQT parameters");
    }
    const double nyquist = clip.sample_rate_hz / 2.0;
    if (params.fmin_hz * std::pow(2.0, params.n_octaves) > nyquist) {
        throw ParameterError("CQT range exceeds Nyquist frequency");
    }
    if (clip.samples.empty()) {
        throw EmptyInputError("cannot transform an empty clip: " + clip.source_id);
    }

    const int n_bins = params.bins_per_octave * params.n_octaves;
    const double q = cqt_q_factor(params.bins_per_octave);
    const double sr = clip.sample_rate_hz;

    // Precompute one complex kernel per bin; shared across frames.
    struct Kernel {
        std::vector<double> re, im;
        std::ptrdiff_t half = 0;
    };
    std::vector<Kernel> kernels(static_cast<std::size_t>(n_bins));
    std::vector<double> freqs(static_cast<std::size_t>(n_bins));
    for (int j = 0; j < n_bins; ++j) {
        const double fj = params.fmin_hz *
                          std::pow(2.0, static_cast<double>(j) / params.bins_per_octave);
        freqs[static_cast<std::size_t>(j)] = fj;
        const int n_len = std::max(2, static_cast<int>(std::ceil(q * sr / fj)));
        const std::vector<double> win = hann_symmetric(n_len);
        double wsum = 0.0;
        for (const double w : win) {
            wsum += w;
        }
        Kernel& k = kernels[static_cast<std::size_t>(j)];
        k.half = n_len / 2;
        k.re.resize(static_cast<std::size_t>(n_len));
        k.im.resize(static_cast<std::size_t>(n_len));
        for (int n = 0; n < n_len; ++n) {
            const double t = static_cast<double>(n - n_len / 2) / sr;
            const double phase = -kTwoPi * fj * t;
            const double w = win[static_cast<std::size_t>(n)] / wsum;
            k.re[static_cast<std::size_t>(n)] = w * std::cos(phase);
            k.im[static_cast<std::size_t>(n)] = w * std::sin(phase);
        }
    }

    const std::size_t len = clip.samples.size();
    const auto flen = static_cast<std::size_t>(frame_len);
    const auto hop = static_cast<std::size_t>(hop_len);
    const std::size_t n_frames = len >= flen ? 1 + (len - flen) / hop : 1;

    Spectrogram out;
    out.kind = SpecKind::magnitude;
    out.sample_rate_hz = clip.sample_rate_hz;
    out.bin_freqs_hz = freqs;
    out.values = Matrix(n_frames, static_cast<std::size_t>(n_bins));
    const double* x = clip.samples.data();
    for (std::size_t i = 0; i < n_frames; ++i) {
        const auto center = static_cast<std::ptrdiff_t>(i * hop + flen / 2);
        for (int j = 0; j < n_bins; ++j) {
            const Kernel& k = kernels[static_cast<std::size_t>(j)];
            const auto n_len = static_cast<std::ptrdiff_t>(k.re.size());
            std::ptrdiff_t lo = center - k.half;
            std::ptrdiff_t n0 = 0;
            if (lo < 0) {
                n0 = -lo;
                lo = 0;
            }
            const std::ptrdiff_t n1 =
                std::min(n_len, static_cast<std::ptrdiff_t>(len) - (center - k.half));
            double acc_re = 0.0;
            double acc_im = 0.0;
            const double* xs = x + lo;
            for (std::ptrdiff_t n = n0; n < n1; ++n) {
                const double s = xs[n - n0];
                acc_re += k.re[static_cast<std::size_t>(n)] * s;
                acc_im += k.im[static_cast<std::size_t>(n)] * s;
            }
            out.values(i, static_cast<std::size_t>(j)) =
                std::sqrt(acc_re * acc_re + acc_im * acc_im);
        }
    }
    return out;
}

}  // namespace respire
