#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "respire/config.hpp"
#include "respire/eval.hpp"
#include "respire/synth.hpp"
#include "respire/vectorize.hpp"

namespace respire {

struct ExtractResult {
    int n_extracted = 0;
    int n_skipped = 0;
    std::vector<std::string> skipped;  // participant_id: reason
    std::string dataset_b_path;
    std::string dataset_c_path;
    std::string dataset_bc_path;
};

// Builds B, C, and BC dataset CSVs from a manifest. Per-participant failures
// are skipped and reported; more than half failing aborts with IngestError.
ExtractResult run_extract(const RunConfig& config, const std::string& manifest_path,
                          const std::string& out_dir);

SynthResult run_synth(const RunConfig& config, const std::string& out_dir);

struct GridCell {
    std::string dataset_name;
    SampleType sample_type = SampleType::B;
    std::string model;
    std::string subset;
    CvResult cv;
};

struct EvalReport {
    nlohmann::json config;
    std::vector<GridCell> grid;
    std::vector<RankingEntry> ranking;  // cross-model, pooled over sample types
    nlohmann::json anova;

    nlohmann::json to_json() const;
};

struct RankResult {
    std::string report_path;
    std::string table_path;
    std::vector<std::string> curve_paths;
    std::vector<std::string> plot_paths;
};

// Runs the full models x subsets x sample-types grid over the dataset CSVs
// found in data_dir (dataset_b.csv / dataset_c.csv / dataset_bc.csv,
// filtered by config.sample_types) and writes report.json, table.txt,
// per-fold curve CSVs and optional SVG panels into out_dir.
RankResult run_rank(const RunConfig& config, const std::string& data_dir,
                    const std::string& out_dir);

// Same grid on preloaded datasets; run_rank's core.
EvalReport evaluate_grid(const RunConfig& config,
                         const std::vector<LabeledDataset>& datasets);

// "87.68(.06)" style cell: mean as a percentage, std as a bare fraction.
std::string format_mean_std(double mean, double std);

}  // namespace respire
