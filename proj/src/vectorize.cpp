#include "respire/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "respire/features_timefreq.hpp"

namespace respire {

namespace {

namespace fs = std::filesystem;

const char* kStatNames[kNumStats] = {"min", "max",  "mean", "median",
                                     "var", "q1",   "q3"};

// Linear interpolation between order statistics (inclusive method).
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) {
        return sorted[0];
    }
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::string csv_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

const char* stat_name(Stat s) noexcept { return kStatNames[static_cast<int>(s)]; }

const char* sample_type_name(SampleType t) noexcept {
    switch (t) {
        case SampleType::B: return "B";
        case SampleType::C: return "C";
        case SampleType::BC: return "BC";
    }
    return "?";
}

SampleType sample_type_from_string(const std::string& s) {
    if (s == "B" || s == "b") return SampleType::B;
    if (s == "C" || s == "c") return SampleType::C;
    if (s == "BC" || s == "bc") return SampleType::BC;
    throw SchemaError("unknown sample type '" + s + "'");
}

const char* label_name(int label) noexcept { return label ? "covid" : "healthy"; }

int label_from_string(const std::string& s) {
    if (s == "covid") return 1;
    if (s == "healthy") return 0;
    throw SchemaError("unknown label '" + s + "' (expected covid or healthy)");
}

std::vector<double> summarize(const Matrix& series) {
    if (series.rows() == 0 || series.cols() == 0) {
        throw EmptyInputError("cannot summarize an empty feature series");
    }
    const std::size_t n = series.rows();
    const std::size_t dim = series.cols();
    std::vector<double> out(dim * kNumStats);
    std::vector<double> column(n);
    for (std::size_t d = 0; d < dim; ++d) {
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = series(i, d);
        }
        std::sort(column.begin(), column.end());

        double mean = 0.0;
        for (const double v : column) {
            mean += v;
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const double v : column) {
            var += (v - mean) * (v - mean);
        }
        var /= static_cast<double>(n);

        double* stats = out.data() + d * kNumStats;
        stats[static_cast<int>(Stat::min)] = column.front();
        stats[static_cast<int>(Stat::max)] = column.back();
        stats[static_cast<int>(Stat::mean)] = mean;
        stats[static_cast<int>(Stat::median)] = quantile_sorted(column, 0.5);
        stats[static_cast<int>(Stat::var)] = var;
        stats[static_cast<int>(Stat::q1)] = quantile_sorted(column, 0.25);
        stats[static_cast<int>(Stat::q3)] = quantile_sorted(column, 0.75);
    }
    return out;
}

FeatureLayout FeatureLayout::from_config(const RunConfig& config) {
    struct BlockDef {
        const char* name;
        int dim;
    };
    const BlockDef defs[] = {
        {"rmse", 1},
        {"zcr", 1},
        {"s_bw", 1},
        {"s_cent", 1},
        {"s_flat", 1},
        {"s_flux", 1},
        {"s_roll", 1},
        {"s_cont", config.contrast_bands + 1},
        {"mfcc", config.n_mfcc},
        {"mfcc_d", config.n_mfcc},
        {"mfcc_d2", config.n_mfcc},
        {"c_ens", 12},
        {"c_cqt", 12},
        {"c_stft", 12},
        {"tn", 6},
    };

    auto enabled = [&](const char* name) {
        return config.features.empty() ||
               std::find(config.features.begin(), config.features.end(), name) !=
                   config.features.end();
    };

    FeatureLayout layout;
    for (const auto& def : defs) {
        if (!enabled(def.name)) {
            continue;
        }
        layout.block_names_.emplace_back(def.name);
        layout.block_begin_.push_back(layout.names_.size());
        layout.block_dims_.push_back(def.dim);
        for (int d = 0; d < def.dim; ++d) {
            for (int s = 0; s < kNumStats; ++s) {
                layout.names_.push_back(std::string(def.name) + "." +
                                        std::to_string(d) + "." + kStatNames[s]);
            }
        }
    }
    return layout;
}

std::pair<std::size_t, std::size_t> FeatureLayout::block_range(
    const std::string& block) const {
    for (std::size_t i = 0; i < block_names_.size(); ++i) {
        if (block_names_[i] == block) {
            const std::size_t begin = block_begin_[i];
            return {begin, begin + static_cast<std::size_t>(block_dims_[i]) * kNumStats};
        }
    }
    throw ParameterError("unknown feature block '" + block + "'");
}

std::size_t FeatureLayout::index_of(const std::string& block, int dim, Stat stat) const {
    const auto [begin, end] = block_range(block);
    const auto idx = begin + static_cast<std::size_t>(dim) * kNumStats +
                     static_cast<std::size_t>(stat);
    if (idx >= end) {
        throw ParameterError("dimension out of range for block '" + block + "'");
    }
    return idx;
}

int FeatureLayout::block_dim(const std::string& block) const {
    for (std::size_t i = 0; i < block_names_.size(); ++i) {
        if (block_names_[i] == block) {
            return block_dims_[i];
        }
    }
    throw ParameterError("unknown feature block '" + block + "'");
}

std::vector<std::string> FeatureLayout::category_blocks(const std::string& category) {
    if (category == "time") return {"rmse", "zcr"};
    if (category == "spectral")
        return {"s_bw", "s_cent", "s_cont", "s_flat", "s_flux", "s_roll"};
    if (category == "cepstral") return {"mfcc", "mfcc_d", "mfcc_d2"};
    if (category == "tonal") return {"c_ens", "c_cqt", "c_stft", "tn"};
    throw ParameterError("unknown feature category '" + category + "'");
}

FeatureVector build_feature_vector(const AudioClip& clip, const RunConfig& config,
                                   SampleKind kind, std::string participant_id) {
    AudioClip conditioned = clip.sample_rate_hz == config.sample_rate
                                ? clip
                                : resample(clip, config.sample_rate);
    try {
        conditioned = trim_silence(conditioned, config.trim_db, config.frame_len,
                                   config.hop_len);
    } catch (const AllSilentError&) {
        throw AllSilentError("all samples below trim threshold: " + clip.source_id);
    }
    conditioned = normalize_amplitude(conditioned);

    const FeatureLayout layout = FeatureLayout::from_config(config);
    const FrameMatrix frames =
        frame_signal(conditioned, config.frame_len, config.hop_len);
    const Spectrogram mag = stft(frames);
    const Spectrogram power = to_power(mag);

    const SpectralParams sp{config.rolloff_fraction, config.contrast_bands,
                            config.contrast_fmin, config.contrast_alpha};
    const MfccParams mp{config.n_mfcc, config.n_mels, 0.0, 0.0};
    const CqtParams cq{config.cqt_bins_per_octave, config.cqt_octaves, config.cqt_fmin};

    auto needs = [&](const char* block) {
        const auto& blocks = layout.blocks();
        return std::find(blocks.begin(), blocks.end(), block) != blocks.end();
    };

    // Shared intermediates; the CQT is reused by c_ens, c_cqt and tn.
    CepstralMatrix cep_base;
    if (needs("mfcc") || needs("mfcc_d") || needs("mfcc_d2")) {
        cep_base = mfcc_from_power(power, mp);
    }
    ChromaMatrix chroma_q;
    if (needs("c_ens") || needs("c_cqt") || needs("tn")) {
        chroma_q = chroma_from_cqt(cqt(conditioned, cq, config.frame_len, config.hop_len),
                                   cq.bins_per_octave);
    }

    FeatureVector out;
    out.kind = kind;
    out.participant_id = std::move(participant_id);
    out.source_id = clip.source_id;
    out.values.reserve(layout.size());

    auto push = [&](const Matrix& series) {
        const auto stats = summarize(series);
        out.values.insert(out.values.end(), stats.begin(), stats.end());
    };

    for (const auto& block : layout.blocks()) {
        if (block == "rmse") push(rmse(frames).values);
        else if (block == "zcr") push(zcr(frames).values);
        else if (block == "s_bw") push(spectral_bandwidth(mag).values);
        else if (block == "s_cent") push(spectral_centroid(mag).values);
        else if (block == "s_flat") push(spectral_flatness(power).values);
        else if (block == "s_flux") push(spectral_flux(mag).values);
        else if (block == "s_roll") push(spectral_rolloff(mag, sp).values);
        else if (block == "s_cont") push(spectral_contrast(mag, sp).values);
        else if (block == "mfcc") push(cep_base.values);
        else if (block == "mfcc_d") push(delta(cep_base, 1, config.delta_width).values);
        else if (block == "mfcc_d2") push(delta(cep_base, 2, config.delta_width).values);
        else if (block == "c_ens")
            push(cens_from_chroma(chroma_q, config.cens_smooth).values);
        else if (block == "c_cqt") push(chroma_q.values);
        else if (block == "c_stft") push(chroma_stft_from_power(power).values);
        else if (block == "tn") push(tonnetz(chroma_q).values);
    }
    return out;
}

std::vector<double> concat_bc(const FeatureVector& breath, const FeatureVector& cough) {
    if (breath.participant_id != cough.participant_id) {
        throw PairingError("cannot pair breath '" + breath.participant_id +
                           "' with cough '" + cough.participant_id + "'");
    }
    std::vector<double> out;
    out.reserve(breath.values.size() + cough.values.size());
    out.insert(out.end(), breath.values.begin(), breath.values.end());
    out.insert(out.end(), cough.values.begin(), cough.values.end());
    return out;
}

std::vector<ManifestRecord> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestError("cannot open manifest " + path);
    }
    const fs::path base = fs::path(path).parent_path();

    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("manifest is empty: " + path);
    }
    const auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"participant_id", "breath_path",
                                               "cough_path", "label"};
    if (std::vector<std::string>(header.begin(), header.end()) != expected) {
        throw SchemaError("manifest header must be participant_id,breath_path,"
                          "cough_path,label: " + path);
    }

    std::vector<ManifestRecord> records;
    std::set<std::string> seen;
    std::vector<std::string> missing;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 4) {
            throw SchemaError("manifest line " + std::to_string(line_no) +
                              " has " + std::to_string(fields.size()) +
                              " fields, expected 4");
        }
        ManifestRecord rec;
        rec.participant_id = fields[0];
        rec.breath_path = (base / fields[1]).string();
        rec.cough_path = (base / fields[2]).string();
        rec.label = label_from_string(fields[3]);
        if (!seen.insert(rec.participant_id).second) {
            throw IngestError("duplicate participant_id '" + rec.participant_id +
                              "' in manifest");
        }
        if (!fs::exists(rec.breath_path)) {
            missing.push_back("line " + std::to_string(line_no) + ": " +
                              rec.breath_path);
        }
        if (!fs::exists(rec.cough_path)) {
            missing.push_back("line " + std::to_string(line_no) + ": " +
                              rec.cough_path);
        }
        records.push_back(std::move(rec));
    }
    if (!missing.empty()) {
        std::string msg = "manifest references missing files:";
        for (const auto& m : missing) {
            msg += "\n  " + m;
        }
        throw IngestError(msg);
    }
    return records;
}

void write_dataset(const LabeledDataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write dataset " + path);
    }
    out << "# respire-dataset layout=" << dataset.layout_version
        << " sample_type=" << sample_type_name(dataset.sample_type) << "\n";
    out << "participant_id,label";
    for (const auto& name : dataset.column_names) {
        out << "," << name;
    }
    out << "\n";
    for (std::size_t i = 0; i < dataset.n_samples(); ++i) {
        out << dataset.participant_ids[i] << "," << label_name(dataset.labels[i]);
        const auto row = dataset.rows.row(i);
        for (const double v : row) {
            out << "," << csv_double(v);
        }
        out << "\n";
    }
}

LabeledDataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open dataset " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("dataset file is empty: " + path);
    }

    LabeledDataset dataset;
    {
        std::stringstream ss(line);
        std::string tag, marker, kv;
        ss >> tag >> marker;
        if (tag != "#" || marker != "respire-dataset") {
            throw SchemaError("missing dataset header line in " + path);
        }
        bool have_layout = false;
        while (ss >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                continue;
            }
            const std::string key = kv.substr(0, eq);
            const std::string value = kv.substr(eq + 1);
            if (key == "layout") {
                if (value != kLayoutVersion) {
                    throw SchemaError("dataset layout '" + value +
                                      "' does not match expected '" +
                                      kLayoutVersion + "'");
                }
                dataset.layout_version = value;
                have_layout = true;
            } else if (key == "sample_type") {
                dataset.sample_type = sample_type_from_string(value);
            }
        }
        if (!have_layout) {
            throw SchemaError("dataset header lacks a layout version: " + path);
        }
    }

    if (!std::getline(in, line)) {
        throw SchemaError("dataset lacks a column header: " + path);
    }
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "participant_id" || header[1] != "label") {
        throw SchemaError("dataset column header must start with participant_id,label");
    }
    dataset.column_names.assign(header.begin() + 2, header.end());
    const std::size_t dim = dataset.column_names.size();

    std::vector<double> values;
    int line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != dim + 2) {
            throw SchemaError("dataset line " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) + " columns, expected " +
                              std::to_string(dim + 2));
        }
        dataset.participant_ids.push_back(fields[0]);
        dataset.labels.push_back(label_from_string(fields[1]));
        for (std::size_t i = 0; i < dim; ++i) {
            try {
                values.push_back(std::stod(fields[i + 2]));
            } catch (const std::exception&) {
                throw SchemaError("dataset line " + std::to_string(line_no) +
                                  " has a non-numeric cell '" + fields[i + 2] + "'");
            }
        }
    }

    dataset.rows = Matrix(dataset.participant_ids.size(), dim);
    std::copy(values.begin(), values.end(), dataset.rows.data().begin());
    return dataset;
}

}  // namespace respire
