#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "respire/errors.hpp"

namespace respire {

struct ModelHyperparams {
    double lr_l2 = 1e-3;
    int lr_max_iter = 5000;
    double lr_tol = 1e-6;
    int knn_k = 5;
    int rf_trees = 100;
    int rf_max_depth = 16;
    int rf_min_split = 2;
    double svm_c = 1.0;
    int svm_iters = 2000;
    int ada_rounds = 50;
    int ada_trees = 10;
    int ada_depth = 3;
};

// Flat key=value run configuration. Every knob the pipeline touches lives
// here and is serialized into reports for provenance.
struct RunConfig {
    // signal conditioning
    int sample_rate = 22050;
    int frame_len = 2048;
    int hop_len = 512;
    double trim_db = 60.0;

    // spectral feature knobs
    double rolloff_fraction = 0.85;
    double contrast_fmin = 200.0;
    double contrast_alpha = 0.02;
    int contrast_bands = 6;

    // time-frequency feature knobs
    int n_mfcc = 20;
    int n_mels = 40;
    int delta_width = 4;
    int cens_smooth = 41;
    int cqt_bins_per_octave = 12;
    int cqt_octaves = 7;
    double cqt_fmin = 32.703;

    // enabled feature blocks; empty = all 15
    std::vector<std::string> features;

    // evaluation
    ModelHyperparams hyper;
    int n_folds = 5;
    std::uint64_t seed = 42;
    double decision_threshold = 0.5;
    std::vector<std::string> models = {"ada", "knn", "lr", "rf", "svm"};
    std::vector<std::string> subsets = {"time", "spectral", "cepstral", "tonal"};
    std::vector<std::string> sample_types = {"b", "c", "bc"};

    // execution
    int workers = 0;  // 0 = RESPIRE_WORKERS env var, then hardware
    bool plots = false;

    // synthetic corpus generation
    int synth_n = 20;
    double synth_min_s = 1.0;
    double synth_max_s = 3.0;
    std::string synth_covid = "tones:262,330,392,523,659,784";
    std::string synth_healthy = "tones:277,349,415,554,698,831";

    // Applies one key=value pair; unknown keys or unparsable values throw
    // ParameterError.
    void set(const std::string& key, const std::string& value);

    // Range checks; throws ParameterError on the first violation.
    void validate() const;

    // Full key=value view, used for provenance and the config file format.
    std::map<std::string, std::string> to_map() const;

    static RunConfig from_file(const std::string& path);
    void save(const std::string& path) const;
};

// Worker count resolution: explicit config wins, then RESPIRE_WORKERS, then
// hardware concurrency.
int effective_workers(const RunConfig& config);

}  // namespace respire
