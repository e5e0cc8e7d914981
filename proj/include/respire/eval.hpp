#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "respire/matrix.hpp"
#include "respire/models.hpp"
#include "respire/vectorize.hpp"

namespace respire {

// Group-aware stratified fold split: all rows of a group share a fold and
// per-fold class counts stay within one sample of an even split.
struct FoldAssignment {
    std::vector<int> fold_of_row;
    int n_folds = 5;
};

FoldAssignment stratified_folds(const std::vector<int>& labels,
                                const std::vector<std::string>& groups, int n_folds,
                                std::uint64_t seed);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocResult {
    std::vector<RocPoint> curve;
    double auc = 0.0;
};

// Threshold sweep over all distinct scores; AUC by trapezoid, which gives
// ties the Mann-Whitney half credit.
RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

struct PrResult {
    std::vector<PrPoint> curve;
    double average_precision = 0.0;
};

// Step-integrated average precision over descending-score thresholds.
PrResult pr_ap(std::span<const double> scores, std::span<const int> labels);

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    bool no_predicted_positives = false;
};

PrecisionRecall precision_recall_at(std::span<const double> scores,
                                    std::span<const int> labels,
                                    double threshold = 0.5);

struct FoldMetrics {
    double auc = 0.0;
    double ap = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    RocResult roc;
    PrResult pr;
};

struct CvResult {
    std::vector<FoldMetrics> folds;
    double mean_auc = 0.0, std_auc = 0.0;
    double mean_ap = 0.0, std_ap = 0.0;
    double mean_precision = 0.0, std_precision = 0.0;
    double mean_recall = 0.0, std_recall = 0.0;
};

// Resolves a subset name ("all", a category, or a feature block) to column
// indices of the dataset; BC datasets match both halves.
std::vector<std::size_t> resolve_subset(const LabeledDataset& dataset,
                                        const std::string& subset);

// Per-fold train/score/metrics over participant-grouped stratified folds.
// Fold statistics are mean and population standard deviation.
CvResult cross_validate(const LabeledDataset& dataset, ModelKind kind,
                        const std::string& subset, int n_folds, std::uint64_t seed,
                        const ModelHyperparams& hyper = {}, double threshold = 0.5);

struct RankingEntry {
    std::string subset;
    double cross_model_mean = 0.0;
    std::map<std::string, double> per_model_mean;  // model name -> mean AUC
};

// Subsets ordered by cross-model mean ROC-AUC, ties broken by subset name.
std::vector<RankingEntry> rank_features(const LabeledDataset& dataset,
                                        const std::vector<ModelKind>& kinds,
                                        const std::vector<std::string>& subsets,
                                        int n_folds, std::uint64_t seed,
                                        const ModelHyperparams& hyper = {},
                                        double threshold = 0.5);

struct AnovaResult {
    double f_stat = 0.0;
    double p_value = 1.0;
    int df_conditions = 0;
    int df_error = 0;
};

// One-way repeated-measures ANOVA: rows are subjects (folds), columns are
// conditions. Throws DegenerateVarianceError when the error variance is zero
// while a condition effect exists.
AnovaResult rm_anova(const Matrix& metric_matrix);

// Upper tail of the F distribution via the regularized incomplete beta
// function; exposed for the evaluation report and its tests.
double f_distribution_sf(double f, int df1, int df2);

}  // namespace respire
