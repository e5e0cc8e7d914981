#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "respire/models.hpp"
#include "respire/rng.hpp"

using namespace respire;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

// Two Gaussian blobs in d dimensions whose centers sit `separation` standard
// deviations apart along the first axis.
struct Blobs {
    Matrix rows;
    std::vector<int> labels;
};

Blobs gaussian_blobs(std::size_t n, std::size_t d, double separation,
                     std::uint64_t seed) {
    Rng rng(seed);
    Blobs blobs;
    blobs.rows = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2);
        blobs.labels.push_back(label);
        for (std::size_t j = 0; j < d; ++j) {
            double v = rng.normal();
            if (j == 0 && label == 1) {
                v += separation;
            }
            blobs.rows(i, j) = v;
        }
    }
    return blobs;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("standardizer z-scores with train statistics only") {
    const Matrix train = from_rows({{1.0, 5.0}, {3.0, 5.0}});
    const Standardizer s = standardize_fit(train);

    SUBCASE("column [1,3] maps to [-1,1]") {
        const Matrix z = s.apply(train);
        CHECK(z(0, 0) == doctest::Approx(-1.0));
        CHECK(z(1, 0) == doctest::Approx(1.0));
    }
    SUBCASE("constant column passes through unchanged") {
        const Matrix z = s.apply(train);
        CHECK(z(0, 1) == doctest::Approx(5.0));
        CHECK(z(1, 1) == doctest::Approx(5.0));
    }
    SUBCASE("test rows use train statistics, never their own") {
        const auto z = s.apply(std::vector<double>{5.0, 7.0});
        CHECK(z[0] == doctest::Approx(3.0));  // (5 - 2)/1
        CHECK(z[1] == doctest::Approx(7.0));  // constant column untouched
    }
    SUBCASE("dimension mismatch raises SchemaError") {
        CHECK_THROWS_AS(s.apply(std::vector<double>{1.0}), SchemaError);
    }
}

TEST_CASE("logistic regression orders separable 1-D data") {
    const Matrix x = from_rows({{-1.0}, {-0.8}, {-1.2}, {1.0}, {0.8}, {1.2}});
    const std::vector<int> y{0, 0, 0, 1, 1, 1};
    const TrainedModel model = train(ModelKind::lr, x, y, {}, 1);
    CHECK(model.score(std::vector<double>{1.0}) >
          model.score(std::vector<double>{-1.0}));
    CHECK(model.score(std::vector<double>{1.0}) > 0.5);
    CHECK(model.score(std::vector<double>{-1.0}) < 0.5);
}

TEST_CASE("random forest is deterministic under a fixed seed") {
    const Blobs blobs = gaussian_blobs(60, 6, 2.0, 5);
    const TrainedModel a = train(ModelKind::rf, blobs.rows, blobs.labels, {}, 77);
    const TrainedModel b = train(ModelKind::rf, blobs.rows, blobs.labels, {}, 77);
    for (std::size_t i = 0; i < blobs.rows.rows(); ++i) {
        CHECK(a.score(blobs.rows.row(i)) == b.score(blobs.rows.row(i)));
    }
    CHECK(a.to_json() == b.to_json());
}

TEST_CASE("knn with k=1 scores a training point as its own label") {
    ModelHyperparams hp;
    hp.knn_k = 1;
    const Matrix x = from_rows({{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}});
    const std::vector<int> y{0, 1, 0, 1};
    const TrainedModel model = train(ModelKind::knn, x, y, hp, 1);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(model.score(x.row(i)) == doctest::Approx(y[i]));
    }
}

TEST_CASE("knn vote fraction: 3 covid of 5 neighbors -> 0.6") {
    ModelHyperparams hp;
    hp.knn_k = 5;
    // five training points around the origin, three covid
    const Matrix x = from_rows(
        {{0.1, 0.0}, {-0.1, 0.0}, {0.0, 0.1}, {0.0, -0.1}, {0.1, 0.1}, {9.0, 9.0}});
    const std::vector<int> y{1, 1, 1, 0, 0, 0};
    const TrainedModel model = train(ModelKind::knn, x, y, hp, 1);
    CHECK(model.score(std::vector<double>{0.0, 0.0}) == doctest::Approx(0.6));
}

TEST_CASE("every model kind keeps scores in [0,1] and deterministic") {
    const Blobs blobs = gaussian_blobs(40, 4, 1.0, 9);
    for (const ModelKind kind : {ModelKind::ada, ModelKind::knn, ModelKind::lr,
                                 ModelKind::rf, ModelKind::svm}) {
        ModelHyperparams hp;
        hp.rf_trees = 20;
        hp.ada_rounds = 5;
        hp.svm_iters = 200;
        hp.lr_max_iter = 200;
        const TrainedModel model = train(kind, blobs.rows, blobs.labels, hp, 3);
        for (std::size_t i = 0; i < blobs.rows.rows(); ++i) {
            const double s = model.score(blobs.rows.row(i));
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
            CHECK(s == model.score(blobs.rows.row(i)));
        }
    }
}

TEST_CASE("all five kinds reach holdout AUC >= 0.95 on 3-sigma blobs") {
    const Blobs blobs = gaussian_blobs(400, 10, 3.0, 2024);
    // first half trains, second half tests; labels alternate so both halves
    // stay class-balanced
    Matrix train_x(200, 10), test_x(200, 10);
    std::vector<int> train_y, test_y;
    for (std::size_t i = 0; i < 400; ++i) {
        Matrix& dst = i < 200 ? train_x : test_x;
        auto& dst_y = i < 200 ? train_y : test_y;
        std::copy(blobs.rows.row(i).begin(), blobs.rows.row(i).end(),
                  dst.row(i % 200).begin());
        dst_y.push_back(blobs.labels[i]);
    }
    for (const ModelKind kind : {ModelKind::ada, ModelKind::knn, ModelKind::lr,
                                 ModelKind::rf, ModelKind::svm}) {
        const TrainedModel model = train(kind, train_x, train_y, {}, 11);
        const std::vector<double> scores = model.score_rows(test_x);
        const double auc = oracle::pairwise_auc(scores, test_y);
        INFO("kind = ", model_kind_name(kind), ", auc = ", auc);
        CHECK(auc >= 0.95);
    }
}

TEST_CASE("training-row permutation leaves LR/SVM scores within 1e-9 and KNN exact") {
    const Blobs blobs = gaussian_blobs(50, 5, 1.5, 31);
    Matrix reversed(blobs.rows.rows(), blobs.rows.cols());
    std::vector<int> reversed_y(blobs.labels.size());
    for (std::size_t i = 0; i < blobs.rows.rows(); ++i) {
        const std::size_t j = blobs.rows.rows() - 1 - i;
        std::copy(blobs.rows.row(i).begin(), blobs.rows.row(i).end(),
                  reversed.row(j).begin());
        reversed_y[j] = blobs.labels[i];
    }

    const Blobs probe = gaussian_blobs(20, 5, 1.5, 32);
    for (const ModelKind kind : {ModelKind::lr, ModelKind::svm}) {
        const TrainedModel a = train(kind, blobs.rows, blobs.labels, {}, 7);
        const TrainedModel b = train(kind, reversed, reversed_y, {}, 7);
        for (std::size_t i = 0; i < probe.rows.rows(); ++i) {
            CHECK(std::abs(a.score(probe.rows.row(i)) - b.score(probe.rows.row(i))) <
                  1e-9);
        }
    }
    const TrainedModel ka = train(ModelKind::knn, blobs.rows, blobs.labels, {}, 7);
    const TrainedModel kb = train(ModelKind::knn, reversed, reversed_y, {}, 7);
    for (std::size_t i = 0; i < probe.rows.rows(); ++i) {
        CHECK(ka.score(probe.rows.row(i)) == kb.score(probe.rows.row(i)));
    }
}

TEST_CASE("single-class training raises DegenerateLabelsError") {
    const Matrix x = from_rows({{1.0}, {2.0}, {3.0}});
    const std::vector<int> y{1, 1, 1};
    for (const ModelKind kind : {ModelKind::ada, ModelKind::knn, ModelKind::lr,
                                 ModelKind::rf, ModelKind::svm}) {
        CHECK_THROWS_AS(train(kind, x, y, {}, 1), DegenerateLabelsError);
    }
}

TEST_CASE("scoring a row of the wrong width raises SchemaError") {
    const Matrix x = from_rows({{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {0.0, 0.0}});
    const std::vector<int> y{1, 0, 1, 0};
    const TrainedModel model = train(ModelKind::lr, x, y, {}, 1);
    CHECK_THROWS_AS(model.score(std::vector<double>{1.0}), SchemaError);
}

TEST_CASE("model JSON round-trip preserves scores for every kind") {
    const Blobs blobs = gaussian_blobs(40, 4, 2.0, 17);
    const Blobs probe = gaussian_blobs(10, 4, 2.0, 18);
    ModelHyperparams hp;
    hp.rf_trees = 10;
    hp.ada_rounds = 3;
    hp.svm_iters = 100;
    hp.lr_max_iter = 100;
    for (const ModelKind kind : {ModelKind::ada, ModelKind::knn, ModelKind::lr,
                                 ModelKind::rf, ModelKind::svm}) {
        const TrainedModel model = train(kind, blobs.rows, blobs.labels, hp, 5);
        const TrainedModel back = TrainedModel::from_json(model.to_json());
        CHECK(back.kind() == kind);
        CHECK(back.layout_version() == model.layout_version());
        for (std::size_t i = 0; i < probe.rows.rows(); ++i) {
            CHECK(back.score(probe.rows.row(i)) ==
                  doctest::Approx(model.score(probe.rows.row(i))).epsilon(1e-15));
        }
    }
}

TEST_CASE("lr with zero learned weights scores 0.5 everywhere") {
    // constant features give a zero gradient direction and zero weights
    nlohmann::json j;
    j["format"] = "respire-model";
    j["format_version"] = 1;
    j["kind"] = "lr";
    j["layout_version"] = "v1";
    ModelHyperparams hp;
    j["hyperparams"] = {{"lr_l2", hp.lr_l2},         {"lr_max_iter", hp.lr_max_iter},
                        {"lr_tol", hp.lr_tol},       {"knn_k", hp.knn_k},
                        {"rf_trees", hp.rf_trees},   {"rf_max_depth", hp.rf_max_depth},
                        {"rf_min_split", hp.rf_min_split}, {"svm_c", hp.svm_c},
                        {"svm_iters", hp.svm_iters}, {"ada_rounds", hp.ada_rounds},
                        {"ada_trees", hp.ada_trees}, {"ada_depth", hp.ada_depth}};
    j["standardizer"] = {{"mean", std::vector<double>{0.0, 0.0}},
                         {"scale", std::vector<double>{1.0, 1.0}}};
    j["state"] = {{"weights", std::vector<double>{0.0, 0.0}}, {"bias", 0.0}};
    const TrainedModel model = TrainedModel::from_json(j);
    CHECK(model.score(std::vector<double>{3.0, -4.0}) == doctest::Approx(0.5));
    CHECK(model.score(std::vector<double>{0.0, 100.0}) == doctest::Approx(0.5));
}

}  // TEST_SUITE
