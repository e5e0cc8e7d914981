#include "respire/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace respire {

namespace {

std::string trim_ws(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim_ws(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::string join_list(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += v[i];
    }
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ParameterError("config key '" + key + "' expects an integer, got '" +
                             value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ParameterError("config key '" + key + "' expects a number, got '" +
                             value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ParameterError("config key '" + key +
                             "' expects an unsigned integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "no") return false;
    throw ParameterError("config key '" + key + "' expects a boolean, got '" + value +
                         "'");
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

const std::vector<std::string> kAllBlocks = {
    "rmse", "zcr",  "s_bw",   "s_cent", "s_flat", "s_flux", "s_roll", "s_cont",
    "mfcc", "mfcc_d", "mfcc_d2", "c_ens", "c_cqt",  "c_stft", "tn"};

const std::vector<std::string> kModelNames = {"ada", "knn", "lr", "rf", "svm"};

const std::vector<std::string> kSubsetNames = {
    "all", "time", "spectral", "cepstral", "tonal",
    "rmse", "zcr",  "s_bw",    "s_cent",  "s_flat", "s_flux", "s_roll", "s_cont",
    "mfcc", "mfcc_d", "mfcc_d2", "c_ens", "c_cqt", "c_stft", "tn"};

void check_names(const std::string& key, const std::vector<std::string>& values,
                 const std::vector<std::string>& allowed) {
    for (const auto& v : values) {
        if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            throw ParameterError("config key '" + key + "' has unknown entry '" + v +
                                 "'");
        }
    }
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "sample_rate") sample_rate = parse_int(key, value);
    else if (key == "frame_len") frame_len = parse_int(key, value);
    else if (key == "hop_len") hop_len = parse_int(key, value);
    else if (key == "trim_db") trim_db = parse_double(key, value);
    else if (key == "rolloff_fraction") rolloff_fraction = parse_double(key, value);
    else if (key == "contrast_fmin") contrast_fmin = parse_double(key, value);
    else if (key == "contrast_alpha") contrast_alpha = parse_double(key, value);
    else if (key == "contrast_bands") contrast_bands = parse_int(key, value);
    else if (key == "n_mfcc") n_mfcc = parse_int(key, value);
    else if (key == "n_mels") n_mels = parse_int(key, value);
    else if (key == "delta_width") delta_width = parse_int(key, value);
    else if (key == "cens_smooth") cens_smooth = parse_int(key, value);
    else if (key == "cqt_bins_per_octave") cqt_bins_per_octave = parse_int(key, value);
    else if (key == "cqt_octaves") cqt_octaves = parse_int(key, value);
    else if (key == "cqt_fmin") cqt_fmin = parse_double(key, value);
    else if (key == "features") {
        features = value == "all" ? std::vector<std::string>{} : split_list(value);
        check_names(key, features, kAllBlocks);
    } else if (key == "lr_l2") hyper.lr_l2 = parse_double(key, value);
    else if (key == "lr_max_iter") hyper.lr_max_iter = parse_int(key, value);
    else if (key == "lr_tol") hyper.lr_tol = parse_double(key, value);
    else if (key == "knn_k") hyper.knn_k = parse_int(key, value);
    else if (key == "rf_trees") hyper.rf_trees = parse_int(key, value);
    else if (key == "rf_max_depth") hyper.rf_max_depth = parse_int(key, value);
    else if (key == "rf_min_split") hyper.rf_min_split = parse_int(key, value);
    else if (key == "svm_c") hyper.svm_c = parse_double(key, value);
    else if (key == "svm_iters") hyper.svm_iters = parse_int(key, value);
    else if (key == "ada_rounds") hyper.ada_rounds = parse_int(key, value);
    else if (key == "ada_trees") hyper.ada_trees = parse_int(key, value);
    else if (key == "ada_depth") hyper.ada_depth = parse_int(key, value);
    else if (key == "n_folds") n_folds = parse_int(key, value);
    else if (key == "seed") seed = parse_u64(key, value);
    else if (key == "decision_threshold") decision_threshold = parse_double(key, value);
    else if (key == "models") {
        models = split_list(value);
        check_names(key, models, kModelNames);
    } else if (key == "subsets") {
        subsets = split_list(value);
        check_names(key, subsets, kSubsetNames);
    } else if (key == "sample_types") {
        sample_types = split_list(value);
        for (auto& s : sample_types) {
            std::transform(s.begin(), s.end(), s.begin(),
                           [](unsigned char c) { return std::tolower(c); });
        }
        check_names(key, sample_types, {"b", "c", "bc"});
    } else if (key == "workers") workers = parse_int(key, value);
    else if (key == "plots") plots = parse_bool(key, value);
    else if (key == "synth_n") synth_n = parse_int(key, value);
    else if (key == "synth_min_s") synth_min_s = parse_double(key, value);
    else if (key == "synth_max_s") synth_max_s = parse_double(key, value);
    else if (key == "synth_covid") synth_covid = value;
    else if (key == "synth_healthy") synth_healthy = value;
    else throw ParameterError("unknown config key '" + key + "'");
}

void RunConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) {
            throw ParameterError("invalid config: " + what);
        }
    };
    require(sample_rate > 0, "sample_rate must be positive");
    require(frame_len >= 1 && hop_len >= 1, "frame_len and hop_len must be positive");
    require(frame_len >= hop_len, "frame_len must be >= hop_len");
    require(trim_db >= 0.0, "trim_db must be non-negative");
    require(rolloff_fraction > 0.0 && rolloff_fraction <= 1.0,
            "rolloff_fraction must lie in (0, 1]");
    require(contrast_bands >= 1, "contrast_bands must be >= 1");
    require(contrast_fmin > 0.0, "contrast_fmin must be positive");
    require(contrast_alpha > 0.0 && contrast_alpha <= 1.0,
            "contrast_alpha must lie in (0, 1]");
    require(n_mfcc >= 1 && n_mels >= n_mfcc, "need 1 <= n_mfcc <= n_mels");
    require(delta_width >= 1, "delta_width must be >= 1");
    require(cens_smooth >= 1, "cens_smooth must be >= 1");
    require(cqt_bins_per_octave == 12, "cqt_bins_per_octave must be 12");
    require(cqt_octaves >= 1, "cqt_octaves must be >= 1");
    require(cqt_fmin > 0.0, "cqt_fmin must be positive");
    require(cqt_fmin * std::pow(2.0, cqt_octaves) <= sample_rate / 2.0,
            "CQT range exceeds Nyquist");
    require(n_folds >= 2, "n_folds must be >= 2");
    require(decision_threshold >= 0.0 && decision_threshold <= 1.0,
            "decision_threshold must lie in [0, 1]");
    require(!models.empty(), "models must not be empty");
    require(!subsets.empty(), "subsets must not be empty");
    require(!sample_types.empty(), "sample_types must not be empty");
    require(workers >= 0, "workers must be non-negative");
    require(hyper.knn_k >= 1, "knn_k must be >= 1");
    require(hyper.rf_trees >= 1 && hyper.rf_max_depth >= 1,
            "rf_trees and rf_max_depth must be >= 1");
    require(hyper.ada_rounds >= 1 && hyper.ada_trees >= 1 && hyper.ada_depth >= 1,
            "ada knobs must be >= 1");
    require(hyper.lr_max_iter >= 1 && hyper.lr_tol > 0.0 && hyper.lr_l2 >= 0.0,
            "lr knobs out of range");
    require(hyper.svm_c > 0.0 && hyper.svm_iters >= 1, "svm knobs out of range");
    require(synth_n >= 1, "synth_n must be >= 1");
    require(synth_min_s > 0.0 && synth_max_s >= synth_min_s,
            "synth duration range invalid");
}

std::map<std::string, std::string> RunConfig::to_map() const {
    std::map<std::string, std::string> m;
    m["sample_rate"] = std::to_string(sample_rate);
    m["frame_len"] = std::to_string(frame_len);
    m["hop_len"] = std::to_string(hop_len);
    m["trim_db"] = fmt(trim_db);
    m["rolloff_fraction"] = fmt(rolloff_fraction);
    m["contrast_fmin"] = fmt(contrast_fmin);
    m["contrast_alpha"] = fmt(contrast_alpha);
    m["contrast_bands"] = std::to_string(contrast_bands);
    m["n_mfcc"] = std::to_string(n_mfcc);
    m["n_mels"] = std::to_string(n_mels);
    m["delta_width"] = std::to_string(delta_width);
    m["cens_smooth"] = std::to_string(cens_smooth);
    m["cqt_bins_per_octave"] = std::to_string(cqt_bins_per_octave);
    m["cqt_octaves"] = std::to_string(cqt_octaves);
    m["cqt_fmin"] = fmt(cqt_fmin);
    m["features"] = features.empty() ? "all" : join_list(features);
    m["lr_l2"] = fmt(hyper.lr_l2);
    m["lr_max_iter"] = std::to_string(hyper.lr_max_iter);
    m["lr_tol"] = fmt(hyper.lr_tol);
    m["knn_k"] = std::to_string(hyper.knn_k);
    m["rf_trees"] = std::to_string(hyper.rf_trees);
    m["rf_max_depth"] = std::to_string(hyper.rf_max_depth);
    m["rf_min_split"] = std::to_string(hyper.rf_min_split);
    m["svm_c"] = fmt(hyper.svm_c);
    m["svm_iters"] = std::to_string(hyper.svm_iters);
    m["ada_rounds"] = std::to_string(hyper.ada_rounds);
    m["ada_trees"] = std::to_string(hyper.ada_trees);
    m["ada_depth"] = std::to_string(hyper.ada_depth);
    m["n_folds"] = std::to_string(n_folds);
    m["seed"] = std::to_string(seed);
    m["decision_threshold"] = fmt(decision_threshold);
    m["models"] = join_list(models);
    m["subsets"] = join_list(subsets);
    m["sample_types"] = join_list(sample_types);
    m["workers"] = std::to_string(workers);
    m["plots"] = plots ? "1" : "0";
    m["synth_n"] = std::to_string(synth_n);
    m["synth_min_s"] = fmt(synth_min_s);
    m["synth_max_s"] = fmt(synth_max_s);
    m["synth_covid"] = synth_covid;
    m["synth_healthy"] = synth_healthy;
    return m;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file " + path);
    }
    RunConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim_ws(line);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParameterError("config line " + std::to_string(line_no) +
                                 " is not key=value: '" + line + "'");
        }
        cfg.set(trim_ws(line.substr(0, eq)), trim_ws(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

void RunConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write config file " + path);
    }
    for (const auto& [k, v] : to_map()) {
        out << k << "=" << v << "\n";
    }
}

int effective_workers(const RunConfig& config) {
    if (config.workers > 0) {
        return config.workers;
    }
    if (const char* env = std::getenv("RESPIRE_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) {
            return v;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace respire
