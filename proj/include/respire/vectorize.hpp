#pragma once

#include <string>
#include <vector>

#include "respire/audio.hpp"
#include "respire/config.hpp"
#include "respire/features_spectral.hpp"
#include "respire/matrix.hpp"

namespace respire {

inline constexpr int kNumStats = 7;
inline constexpr const char* kLayoutVersion = "v1";

// Statistic order is fixed: min, max, mean, median, var, q1, q3.
enum class Stat { min = 0, max, mean, median, var, q1, q3 };
const char* stat_name(Stat s) noexcept;

// The 7 summary statistics per feature dimension, dimensions contiguous:
// [d0.min .. d0.q3, d1.min .. ]. Quartiles interpolate linearly between
// order statistics; variance is the population variance.
std::vector<double> summarize(const Matrix& series);

// Fixed column order of the per-recording vector: 15 feature blocks, each
// block dim * 7 statistics. With default config this is 812 entries.
class FeatureLayout {
public:
    static FeatureLayout from_config(const RunConfig& config);

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& column_names() const { return names_; }
    const std::vector<std::string>& blocks() const { return block_names_; }
    std::string version() const { return kLayoutVersion; }

    // [begin, end) column range of a block.
    std::pair<std::size_t, std::size_t> block_range(const std::string& block) const;
    std::size_t index_of(const std::string& block, int dim, Stat stat) const;
    int block_dim(const std::string& block) const;

    // Category -> feature blocks, per the four signal-domain groups.
    static std::vector<std::string> category_blocks(const std::string& category);

private:
    std::vector<std::string> names_;
    std::vector<std::string> block_names_;
    std::vector<std::size_t> block_begin_;
    std::vector<int> block_dims_;
};

enum class SampleKind { breath, cough };
enum class SampleType { B, C, BC };

const char* sample_type_name(SampleType t) noexcept;
SampleType sample_type_from_string(const std::string& s);

// Fixed-order summary vector for one recording.
struct FeatureVector {
    std::vector<double> values;
    SampleKind kind = SampleKind::breath;
    std::string participant_id;
    std::string source_id;
};

// Full extraction pipeline for one clip: resample -> trim -> normalize ->
// all enabled extractors -> summary statistics in layout order.
FeatureVector build_feature_vector(const AudioClip& clip, const RunConfig& config,
                                   SampleKind kind = SampleKind::breath,
                                   std::string participant_id = {});

// Breath block first, cough block second; participant ids must match.
std::vector<double> concat_bc(const FeatureVector& breath, const FeatureVector& cough);

struct ManifestRecord {
    std::string participant_id;
    std::string breath_path;
    std::string cough_path;
    int label = 0;  // 1 = covid, 0 = healthy
};

// CSV with header participant_id,breath_path,cough_path,label. Relative
// paths resolve against the manifest's directory. Rows naming missing files
// raise IngestError; unknown labels raise SchemaError.
std::vector<ManifestRecord> load_manifest(const std::string& path);

struct LabeledDataset {
    Matrix rows;
    std::vector<int> labels;  // 1 = covid
    std::vector<std::string> participant_ids;
    SampleType sample_type = SampleType::B;
    std::vector<std::string> column_names;
    std::string layout_version = kLayoutVersion;

    std::size_t n_samples() const { return rows.rows(); }
    std::size_t dim() const { return rows.cols(); }
};

void write_dataset(const LabeledDataset& dataset, const std::string& path);
LabeledDataset read_dataset(const std::string& path);

const char* label_name(int label) noexcept;
int label_from_string(const std::string& s);

}  // namespace respire
