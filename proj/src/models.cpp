#include "respire/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "respire/rng.hpp"

namespace respire {

namespace {

using detail::AdaModel;
using detail::ForestModel;
using detail::KnnModel;
using detail::LinearModel;
using detail::Tree;
using detail::TreeNode;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_labels(const std::vector<int>& labels) {
    bool has_pos = false;
    bool has_neg = false;
    for (const int y : labels) {
        (y ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
        throw DegenerateLabelsError("training set contains a single class");
    }
}

// ---------------------------------------------------------------------------
// CART trees

struct TreeTrainer {
    const Matrix& rows;
    const std::vector<int>& labels;
    int max_depth;
    int min_split;
    std::size_t mtry;
    Rng& rng;
    Tree nodes;

    int build(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end,
              int depth) {
        const std::size_t n = end - begin;
        std::size_t n_pos = 0;
        for (std::size_t i = begin; i < end; ++i) {
            n_pos += static_cast<std::size_t>(labels[idx[i]]);
        }
        const double value = static_cast<double>(n_pos) / static_cast<double>(n);

        const int node_id = static_cast<int>(nodes.size());
        nodes.push_back(TreeNode{-1, 0.0, -1, -1, value});
        if (depth >= max_depth || n < static_cast<std::size_t>(min_split) ||
            n_pos == 0 || n_pos == n) {
            return node_id;
        }

        // Feature subsample without replacement.
        const std::size_t d = rows.cols();
        std::vector<std::size_t> feats(d);
        std::iota(feats.begin(), feats.end(), 0);
        for (std::size_t i = 0; i < mtry; ++i) {
            std::swap(feats[i], feats[i + rng.below(d - i)]);
        }

        double best_gain = 0.0;
        std::size_t best_feat = 0;
        double best_thresh = 0.0;

        const double total_pos = static_cast<double>(n_pos);
        const double nn = static_cast<double>(n);
        const double parent_gini =
            1.0 - (total_pos / nn) * (total_pos / nn) -
            ((nn - total_pos) / nn) * ((nn - total_pos) / nn);

        std::vector<std::pair<double, int>> vals(n);
        for (std::size_t f = 0; f < mtry; ++f) {
            const std::size_t feat = feats[f];
            for (std::size_t i = 0; i < n; ++i) {
                vals[i] = {rows(idx[begin + i], feat), labels[idx[begin + i]]};
            }
            std::sort(vals.begin(), vals.end());

            double left_pos = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_pos += vals[i].second;
                if (vals[i].first == vals[i + 1].first) {
                    continue;
                }
                const double nl = static_cast<double>(i + 1);
                const double nr = nn - nl;
                const double pl = left_pos / nl;
                const double pr = (total_pos - left_pos) / nr;
                const double gini_l = 1.0 - pl * pl - (1.0 - pl) * (1.0 - pl);
                const double gini_r = 1.0 - pr * pr - (1.0 - pr) * (1.0 - pr);
                const double gain =
                    parent_gini - (nl / nn) * gini_l - (nr / nn) * gini_r;
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best_feat = feat;
                    best_thresh = 0.5 * (vals[i].first + vals[i + 1].first);
                }
            }
        }

        if (best_gain <= 0.0) {
            return node_id;
        }

        const auto mid = static_cast<std::size_t>(
            std::partition(idx.begin() + static_cast<std::ptrdiff_t>(begin),
                           idx.begin() + static_cast<std::ptrdiff_t>(end),
                           [&](std::size_t r) {
                               return rows(r, best_feat) <= best_thresh;
                           }) -
            idx.begin());
        if (mid == begin || mid == end) {
            return node_id;
        }

        nodes[static_cast<std::size_t>(node_id)].feature = static_cast<int>(best_feat);
        nodes[static_cast<std::size_t>(node_id)].threshold = best_thresh;
        const int left = build(idx, begin, mid, depth + 1);
        const int right = build(idx, mid, end, depth + 1);
        nodes[static_cast<std::size_t>(node_id)].left = left;
        nodes[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }
};

Tree fit_tree(const Matrix& rows, const std::vector<int>& labels,
              std::vector<std::size_t> sample, int max_depth, int min_split,
              Rng& rng) {
    const auto d = rows.cols();
    const auto mtry = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))));
    TreeTrainer trainer{rows, labels, max_depth, min_split, std::min(mtry, d), rng, {}};
    trainer.build(sample, 0, sample.size(), 0);
    return std::move(trainer.nodes);
}

ForestModel fit_forest(const Matrix& rows, const std::vector<int>& labels,
                       int n_trees, int max_depth, int min_split, std::uint64_t seed,
                       const std::vector<double>* weights) {
    const std::size_t n = rows.rows();
    ForestModel forest;
    forest.trees.reserve(static_cast<std::size_t>(n_trees));

    // Cumulative weights for weighted bootstrap (boosting path).
    std::vector<double> cum;
    if (weights) {
        cum.resize(n);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += (*weights)[i];
            cum[i] = acc;
        }
    }

    for (int t = 0; t < n_trees; ++t) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> sample(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (weights) {
                const double u = rng.next_double() * cum.back();
                sample[i] = static_cast<std::size_t>(
                    std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
            } else {
                sample[i] = rng.below(n);
            }
        }
        forest.trees.push_back(
            fit_tree(rows, labels, std::move(sample), max_depth, min_split, rng));
    }
    return forest;
}

// ---------------------------------------------------------------------------
// Logistic regression: full-batch gradient descent on the L2-regularized
// log loss. The step size comes from a power-iteration estimate of the
// Lipschitz constant; iteration stops on relative loss change <= lr_tol.

LinearModel fit_lr(const Matrix& x, const std::vector<int>& y,
                   const ModelHyperparams& hp) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();

    // lambda_max(X^T X / n) via power iteration.
    std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
    std::vector<double> xv(n);
    double eig = 1.0;
    for (int it = 0; it < 12; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = x.row(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                acc += row[j] * v[j];
            }
            xv[i] = acc;
        }
        std::vector<double> next(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = x.row(i);
            for (std::size_t j = 0; j < d; ++j) {
                next[j] += row[j] * xv[i];
            }
        }
        double norm = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            next[j] /= static_cast<double>(n);
            norm += next[j] * next[j];
        }
        norm = std::sqrt(norm);
        if (norm <= 0.0) {
            break;
        }
        eig = norm;
        for (std::size_t j = 0; j < d; ++j) {
            v[j] = next[j] / norm;
        }
    }
    const double step = 1.0 / (0.25 * eig + hp.lr_l2 + 1.0);

    LinearModel model;
    model.weights.assign(d, 0.0);
    std::vector<double> grad(d);
    double prev_loss = std::numeric_limits<double>::infinity();
    for (int it = 0; it < hp.lr_max_iter; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = x.row(i);
            double z = model.bias;
            for (std::size_t j = 0; j < d; ++j) {
                z += model.weights[j] * row[j];
            }
            const double p = sigmoid(z);
            const double err = p - y[i];
            for (std::size_t j = 0; j < d; ++j) {
                grad[j] += err * row[j];
            }
            grad_b += err;
            loss += y[i] ? -std::log(std::max(p, 1e-300))
                         : -std::log(std::max(1.0 - p, 1e-300));
        }
        double reg = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            grad[j] = grad[j] / static_cast<double>(n) + hp.lr_l2 * model.weights[j];
            reg += model.weights[j] * model.weights[j];
        }
        loss = loss / static_cast<double>(n) + 0.5 * hp.lr_l2 * reg;

        for (std::size_t j = 0; j < d; ++j) {
            model.weights[j] -= step * grad[j];
        }
        model.bias -= step * grad_b / static_cast<double>(n);

        if (std::abs(prev_loss - loss) <= hp.lr_tol * std::max(1.0, std::abs(loss))) {
            break;
        }
        prev_loss = loss;
    }
    return model;
}

// ---------------------------------------------------------------------------
// Linear SVM: Pegasos-style full-batch subgradient descent on the hinge
// loss, lambda = 1/(C*n). The bias rides along as a regularized constant-1
// feature so the 1/sqrt(lambda) projection covers the whole parameter.

LinearModel fit_svm(const Matrix& x, const std::vector<int>& y,
                    const ModelHyperparams& hp) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    const double lambda = 1.0 / (hp.svm_c * static_cast<double>(n));
    const double radius = 1.0 / std::sqrt(lambda);

    std::vector<double> w(d + 1, 0.0);  // w[d] pairs with a constant 1
    std::vector<double> sub(d + 1);
    for (int t = 1; t <= hp.svm_iters; ++t) {
        const double eta = 1.0 / (lambda * t);
        std::fill(sub.begin(), sub.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double yy = y[i] ? 1.0 : -1.0;
            const auto row = x.row(i);
            double z = w[d];
            for (std::size_t j = 0; j < d; ++j) {
                z += w[j] * row[j];
            }
            if (yy * z < 1.0) {
                for (std::size_t j = 0; j < d; ++j) {
                    sub[j] += yy * row[j];
                }
                sub[d] += yy;
            }
        }
        double norm = 0.0;
        for (std::size_t j = 0; j <= d; ++j) {
            w[j] = (1.0 - eta * lambda) * w[j] + eta * sub[j] / static_cast<double>(n);
            norm += w[j] * w[j];
        }
        norm = std::sqrt(norm);
        if (norm > radius) {
            const double shrink = radius / norm;
            for (double& v : w) {
                v *= shrink;
            }
        }
    }

    LinearModel model;
    model.bias = w[d];
    w.pop_back();
    model.weights = std::move(w);
    return model;
}

// ---------------------------------------------------------------------------
// AdaBoost over small random-forest base learners (SAMME, binary).

AdaModel fit_ada(const Matrix& x, const std::vector<int>& y,
                 const ModelHyperparams& hp, std::uint64_t seed) {
    const std::size_t n = x.rows();
    AdaModel model;
    std::vector<double> weights(n, 1.0 / static_cast<double>(n));
    std::vector<int> predicted(n);

    for (int round = 0; round < hp.ada_rounds; ++round) {
        ForestModel learner =
            fit_forest(x, y, hp.ada_trees, hp.ada_depth, hp.rf_min_split,
                       Rng::derive(seed, 7919 + static_cast<std::uint64_t>(round)),
                       &weights);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            predicted[i] = detail::forest_predict(learner, x.row(i)) >= 0.5 ? 1 : 0;
            if (predicted[i] != y[i]) {
                err += weights[i];
            }
        }
        const double eps = std::clamp(err, 1e-12, 1.0 - 1e-12);
        const double alpha = 0.5 * std::log((1.0 - eps) / eps);
        if (alpha <= 0.0) {
            if (model.learners.empty()) {
                model.learners.push_back(std::move(learner));
                model.alphas.push_back(1e-6);
            }
            break;
        }
        model.learners.push_back(std::move(learner));
        model.alphas.push_back(alpha);

        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            weights[i] *= std::exp(predicted[i] == y[i] ? -alpha : alpha);
            total += weights[i];
        }
        for (double& w : weights) {
            w /= total;
        }
        if (err <= 0.0) {
            break;
        }
    }
    return model;
}

KnnModel fit_knn(Matrix x, std::vector<int> y, const ModelHyperparams& hp) {
    KnnModel model;
    model.k = std::min<int>(hp.knn_k, static_cast<int>(x.rows()));
    model.train_rows = std::move(x);
    model.labels = std::move(y);
    return model;
}

double knn_score(const KnnModel& model, std::span<const double> row) {
    const std::size_t n = model.train_rows.rows();
    struct Neighbor {
        double dist2;
        std::size_t index;
    };
    std::vector<Neighbor> neighbors(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto train = model.train_rows.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double d = train[j] - row[j];
            acc += d * d;
        }
        neighbors[i] = {acc, i};
    }
    // Ties broken by the training row's content, then label, so the
    // result does not depend on training-row order.
    auto cmp = [&](const Neighbor& a, const Neighbor& b) {
        if (a.dist2 != b.dist2) {
            return a.dist2 < b.dist2;
        }
        const auto ra = model.train_rows.row(a.index);
        const auto rb = model.train_rows.row(b.index);
        const auto mismatch =
            std::mismatch(ra.begin(), ra.end(), rb.begin(), rb.end());
        if (mismatch.first != ra.end()) {
            return *mismatch.first < *mismatch.second;
        }
        return model.labels[a.index] < model.labels[b.index];
    };
    const auto k = static_cast<std::size_t>(model.k);
    std::partial_sort(neighbors.begin(), neighbors.begin() + static_cast<std::ptrdiff_t>(k),
                      neighbors.end(), cmp);
    double votes = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        votes += model.labels[neighbors[i].index];
    }
    return votes / static_cast<double>(k);
}

}  // namespace

namespace detail {

double tree_predict(const Tree& tree, std::span<const double> row) {
    std::size_t node = 0;
    while (tree[node].feature >= 0) {
        node = static_cast<std::size_t>(
            row[static_cast<std::size_t>(tree[node].feature)] <= tree[node].threshold
                ? tree[node].left
                : tree[node].right);
    }
    return tree[node].leaf_value;
}

double forest_predict(const ForestModel& forest, std::span<const double> row) {
    double acc = 0.0;
    for (const auto& tree : forest.trees) {
        acc += tree_predict(tree, row);
    }
    return acc / static_cast<double>(forest.trees.size());
}

}  // namespace detail

const char* model_kind_name(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::ada: return "ada";
        case ModelKind::knn: return "knn";
        case ModelKind::lr: return "lr";
        case ModelKind::rf: return "rf";
        case ModelKind::svm: return "svm";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "ada") return ModelKind::ada;
    if (s == "knn") return ModelKind::knn;
    if (s == "lr") return ModelKind::lr;
    if (s == "rf") return ModelKind::rf;
    if (s == "svm") return ModelKind::svm;
    throw ParameterError("unknown model kind '" + s + "'");
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
    if (row.size() != mean.size()) {
        throw SchemaError("row dimension " + std::to_string(row.size()) +
                          " does not match standardizer dimension " +
                          std::to_string(mean.size()));
    }
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
        out[j] = (row[j] - mean[j]) / scale[j];
    }
    return out;
}

Matrix Standardizer::apply(const Matrix& rows) const {
    Matrix out(rows.rows(), rows.cols());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        const auto transformed = apply(rows.row(i));
        std::copy(transformed.begin(), transformed.end(), out.row(i).begin());
    }
    return out;
}

Standardizer standardize_fit(const Matrix& train_rows) {
    if (train_rows.rows() < 2) {
        throw ParameterError("standardizer needs at least two training rows");
    }
    const std::size_t n = train_rows.rows();
    const std::size_t d = train_rows.cols();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = train_rows.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            s.mean[j] += row[j];
        }
    }
    for (double& m : s.mean) {
        m /= static_cast<double>(n);
    }
    std::vector<double> var(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = train_rows.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double dv = row[j] - s.mean[j];
            var[j] += dv * dv;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(n));
        if (sd > 0.0) {
            s.scale[j] = sd;
        } else {
            // Zero-variance column: identity transform.
            s.mean[j] = 0.0;
            s.scale[j] = 1.0;
        }
    }
    return s;
}

double TrainedModel::score(std::span<const double> row) const {
    const std::vector<double> z = standardizer_.apply(row);
    switch (kind_) {
        case ModelKind::lr:
        case ModelKind::svm: {
            const auto& m = std::get<LinearModel>(state_);
            double acc = m.bias;
            for (std::size_t j = 0; j < z.size(); ++j) {
                acc += m.weights[j] * z[j];
            }
            return sigmoid(acc);
        }
        case ModelKind::knn:
            return knn_score(std::get<KnnModel>(state_), z);
        case ModelKind::rf:
            return detail::forest_predict(std::get<ForestModel>(state_), z);
        case ModelKind::ada: {
            const auto& m = std::get<AdaModel>(state_);
            double votes = 0.0;
            double total = 0.0;
            for (std::size_t t = 0; t < m.learners.size(); ++t) {
                const double h =
                    detail::forest_predict(m.learners[t], z) >= 0.5 ? 1.0 : 0.0;
                votes += m.alphas[t] * h;
                total += m.alphas[t];
            }
            return total > 0.0 ? votes / total : 0.5;
        }
    }
    return 0.5;
}

std::vector<double> TrainedModel::score_rows(const Matrix& rows) const {
    std::vector<double> out(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        out[i] = score(rows.row(i));
    }
    return out;
}

TrainedModel train(ModelKind kind, const Matrix& rows, const std::vector<int>& labels,
                   const ModelHyperparams& hyper, std::uint64_t seed,
                   std::string layout_version) {
    if (rows.rows() != labels.size()) {
        throw SchemaError("row/label count mismatch");
    }
    check_labels(labels);

    TrainedModel model;
    model.kind_ = kind;
    model.hyper_ = hyper;
    model.layout_version_ = std::move(layout_version);
    model.standardizer_ = standardize_fit(rows);
    const Matrix z = model.standardizer_.apply(rows);

    switch (kind) {
        case ModelKind::lr:
            model.state_ = fit_lr(z, labels, hyper);
            break;
        case ModelKind::svm:
            model.state_ = fit_svm(z, labels, hyper);
            break;
        case ModelKind::knn:
            model.state_ = fit_knn(z, labels, hyper);
            break;
        case ModelKind::rf:
            model.state_ = fit_forest(z, labels, hyper.rf_trees, hyper.rf_max_depth,
                                      hyper.rf_min_split, seed, nullptr);
            break;
        case ModelKind::ada:
            model.state_ = fit_ada(z, labels, hyper, seed);
            break;
    }
    return model;
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace {

nlohmann::json tree_to_json(const Tree& tree) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& n : tree) {
        out.push_back({n.feature, n.threshold, n.left, n.right, n.leaf_value});
    }
    return out;
}

Tree tree_from_json(const nlohmann::json& j) {
    Tree tree;
    for (const auto& n : j) {
        tree.push_back(TreeNode{n.at(0).get<int>(), n.at(1).get<double>(),
                                n.at(2).get<int>(), n.at(3).get<int>(),
                                n.at(4).get<double>()});
    }
    return tree;
}

nlohmann::json forest_to_json(const ForestModel& forest) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : forest.trees) {
        trees.push_back(tree_to_json(tree));
    }
    return {{"trees", trees}};
}

ForestModel forest_from_json(const nlohmann::json& j) {
    ForestModel forest;
    for (const auto& t : j.at("trees")) {
        forest.trees.push_back(tree_from_json(t));
    }
    return forest;
}

nlohmann::json hyper_to_json(const ModelHyperparams& h) {
    return {{"lr_l2", h.lr_l2},         {"lr_max_iter", h.lr_max_iter},
            {"lr_tol", h.lr_tol},       {"knn_k", h.knn_k},
            {"rf_trees", h.rf_trees},   {"rf_max_depth", h.rf_max_depth},
            {"rf_min_split", h.rf_min_split}, {"svm_c", h.svm_c},
            {"svm_iters", h.svm_iters}, {"ada_rounds", h.ada_rounds},
            {"ada_trees", h.ada_trees}, {"ada_depth", h.ada_depth}};
}

ModelHyperparams hyper_from_json(const nlohmann::json& j) {
    ModelHyperparams h;
    h.lr_l2 = j.at("lr_l2");
    h.lr_max_iter = j.at("lr_max_iter");
    h.lr_tol = j.at("lr_tol");
    h.knn_k = j.at("knn_k");
    h.rf_trees = j.at("rf_trees");
    h.rf_max_depth = j.at("rf_max_depth");
    h.rf_min_split = j.at("rf_min_split");
    h.svm_c = j.at("svm_c");
    h.svm_iters = j.at("svm_iters");
    h.ada_rounds = j.at("ada_rounds");
    h.ada_trees = j.at("ada_trees");
    h.ada_depth = j.at("ada_depth");
    return h;
}

Matrix matrix_from_json(const nlohmann::json& j, std::size_t cols) {
    const auto flat = j.get<std::vector<double>>();
    Matrix m(cols == 0 ? 0 : flat.size() / cols, cols);
    std::copy(flat.begin(), flat.end(), m.data().begin());
    return m;
}

}  // namespace

nlohmann::json TrainedModel::to_json() const {
    nlohmann::json j;
    j["format"] = "respire-model";
    j["format_version"] = 1;
    j["kind"] = model_kind_name(kind_);
    j["layout_version"] = layout_version_;
    j["hyperparams"] = hyper_to_json(hyper_);
    j["standardizer"] = {{"mean", standardizer_.mean}, {"scale", standardizer_.scale}};
    switch (kind_) {
        case ModelKind::lr:
        case ModelKind::svm: {
            const auto& m = std::get<LinearModel>(state_);
            j["state"] = {{"weights", m.weights}, {"bias", m.bias}};
            break;
        }
        case ModelKind::knn: {
            const auto& m = std::get<KnnModel>(state_);
            j["state"] = {{"k", m.k},
                          {"dim", m.train_rows.cols()},
                          {"rows", m.train_rows.data()},
                          {"labels", m.labels}};
            break;
        }
        case ModelKind::rf:
            j["state"] = forest_to_json(std::get<ForestModel>(state_));
            break;
        case ModelKind::ada: {
            const auto& m = std::get<AdaModel>(state_);
            nlohmann::json learners = nlohmann::json::array();
            for (const auto& f : m.learners) {
                learners.push_back(forest_to_json(f));
            }
            j["state"] = {{"learners", learners}, {"alphas", m.alphas}};
            break;
        }
    }
    return j;
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "respire-model") {
        throw SchemaError("not a respire model document");
    }
    TrainedModel model;
    model.kind_ = model_kind_from_string(j.at("kind"));
    model.layout_version_ = j.at("layout_version");
    model.hyper_ = hyper_from_json(j.at("hyperparams"));
    model.standardizer_.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
    model.standardizer_.scale =
        j.at("standardizer").at("scale").get<std::vector<double>>();
    const auto& state = j.at("state");
    switch (model.kind_) {
        case ModelKind::lr:
        case ModelKind::svm: {
            LinearModel m;
            m.weights = state.at("weights").get<std::vector<double>>();
            m.bias = state.at("bias");
            model.state_ = std::move(m);
            break;
        }
        case ModelKind::knn: {
            KnnModel m;
            m.k = state.at("k");
            m.train_rows = matrix_from_json(state.at("rows"), state.at("dim"));
            m.labels = state.at("labels").get<std::vector<int>>();
            model.state_ = std::move(m);
            break;
        }
        case ModelKind::rf:
            model.state_ = forest_from_json(state);
            break;
        case ModelKind::ada: {
            AdaModel m;
            for (const auto& f : state.at("learners")) {
                m.learners.push_back(forest_from_json(f));
            }
            m.alphas = state.at("alphas").get<std::vector<double>>();
            model.state_ = std::move(m);
            break;
        }
    }
    return model;
}

void TrainedModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write model file " + path);
    }
    out << to_json().dump(2) << "\n";
}

TrainedModel TrainedModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open model file " + path);
    }
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

}  // namespace respire
