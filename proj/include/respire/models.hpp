#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "respire/config.hpp"
#include "respire/matrix.hpp"

namespace respire {

enum class ModelKind { ada, knn, lr, rf, svm };

const char* model_kind_name(ModelKind kind) noexcept;
ModelKind model_kind_from_string(const std::string& s);

// Per-feature z-scoring fitted on training data only. Zero-variance columns
// pass through unchanged.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;  // 1 for zero-variance columns

    std::vector<double> apply(std::span<const double> row) const;
    Matrix apply(const Matrix& rows) const;
};

Standardizer standardize_fit(const Matrix& train_rows);

namespace detail {

struct TreeNode {
    int feature = -1;          // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;   // covid fraction at the leaf
};

using Tree = std::vector<TreeNode>;

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
};

struct KnnModel {
    Matrix train_rows;
    std::vector<int> labels;
    int k = 5;
};

struct ForestModel {
    std::vector<Tree> trees;
};

struct AdaModel {
    std::vector<ForestModel> learners;
    std::vector<double> alphas;
};

double tree_predict(const Tree& tree, std::span<const double> row);
double forest_predict(const ForestModel& forest, std::span<const double> row);

}  // namespace detail

// A fitted classifier with its standardizer; scoring returns a value in
// [0, 1] that orders rows by covid likelihood.
class TrainedModel {
public:
    ModelKind kind() const { return kind_; }
    const Standardizer& standardizer() const { return standardizer_; }
    const std::string& layout_version() const { return layout_version_; }

    double score(std::span<const double> row) const;
    std::vector<double> score_rows(const Matrix& rows) const;

    nlohmann::json to_json() const;
    static TrainedModel from_json(const nlohmann::json& j);

    void save(const std::string& path) const;
    static TrainedModel load(const std::string& path);

    friend TrainedModel train(ModelKind, const Matrix&, const std::vector<int>&,
                              const ModelHyperparams&, std::uint64_t, std::string);

private:
    ModelKind kind_ = ModelKind::lr;
    Standardizer standardizer_;
    std::string layout_version_;
    ModelHyperparams hyper_;
    std::variant<detail::LinearModel, detail::KnnModel, detail::ForestModel,
                 detail::AdaModel>
        state_;
};

// Fits a model of the requested kind. Labels are 1 = covid, 0 = healthy;
// both classes must be present. Deterministic for a fixed seed.
TrainedModel train(ModelKind kind, const Matrix& rows, const std::vector<int>& labels,
                   const ModelHyperparams& hyper, std::uint64_t seed,
                   std::string layout_version = "v1");

}  // namespace respire
