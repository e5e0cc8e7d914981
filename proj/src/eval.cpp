#include "respire/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "respire/rng.hpp"

namespace respire {

namespace {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(std::span<const double> values) {
    MeanStd ms;
    for (const double v : values) {
        ms.mean += v;
    }
    ms.mean /= static_cast<double>(values.size());
    for (const double v : values) {
        ms.std += (v - ms.mean) * (v - ms.mean);
    }
    ms.std = std::sqrt(ms.std / static_cast<double>(values.size()));
    return ms;
}

// Score-descending order with tie groups collapsed.
struct TieGroup {
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

std::vector<TieGroup> tie_groups(std::span<const double> scores,
                                 std::span<const int> labels) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<TieGroup> groups;
    for (std::size_t i = 0; i < order.size();) {
        TieGroup g;
        const double s = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == s; ++i) {
            if (labels[order[i]]) {
                ++g.n_pos;
            } else {
                ++g.n_neg;
            }
        }
        groups.push_back(g);
    }
    return groups;
}

// Regularized incomplete beta function I_x(a, b), continued fraction
// (modified Lentz).
double ibeta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double eps = 1e-15;
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) {
            break;
        }
    }
    return h;
}

double ibeta_reg(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * ibeta_cf(a, b, x) / a;
    }
    return 1.0 - front * ibeta_cf(b, a, 1.0 - x) / b;
}

}  // namespace

FoldAssignment stratified_folds(const std::vector<int>& labels,
                                const std::vector<std::string>& groups, int n_folds,
                                std::uint64_t seed) {
    if (n_folds < 2) {
        throw FoldError("need at least 2 folds");
    }
    if (labels.size() != groups.size() || labels.empty()) {
        throw FoldError("labels and groups must be non-empty and aligned");
    }

    // Groups in first-occurrence order; the group label is its first row's.
    std::vector<std::string> group_names;
    std::vector<int> group_label;
    std::vector<std::vector<std::size_t>> group_rows;
    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = index_of.try_emplace(groups[i], group_names.size());
        if (inserted) {
            group_names.push_back(groups[i]);
            group_label.push_back(labels[i]);
            group_rows.emplace_back();
        }
        group_rows[it->second].push_back(i);
    }

    for (const int cls : {1, 0}) {
        const auto count = static_cast<std::size_t>(
            std::count(group_label.begin(), group_label.end(), cls));
        if (count < static_cast<std::size_t>(n_folds)) {
            throw FoldError(std::string("class '") + label_name(cls) + "' has " +
                            std::to_string(count) + " groups, need at least " +
                            std::to_string(n_folds));
        }
    }

    FoldAssignment out;
    out.n_folds = n_folds;
    out.fold_of_row.assign(labels.size(), -1);

    // Per class: shuffle groups, then assign each greedily to the fold with
    // the fewest samples of that class (ties by total size, then index).
    std::vector<std::vector<std::size_t>> class_count(
        2, std::vector<std::size_t>(static_cast<std::size_t>(n_folds), 0));
    std::vector<std::size_t> fold_total(static_cast<std::size_t>(n_folds), 0);
    for (const int cls : {1, 0}) {
        std::vector<std::size_t> members;
        for (std::size_t g = 0; g < group_names.size(); ++g) {
            if (group_label[g] == cls) {
                members.push_back(g);
            }
        }
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(cls)));
        rng.shuffle(members);
        for (const std::size_t g : members) {
            std::size_t best = 0;
            for (std::size_t f = 1; f < static_cast<std::size_t>(n_folds); ++f) {
                const auto c = static_cast<std::size_t>(cls);
                if (class_count[c][f] < class_count[c][best] ||
                    (class_count[c][f] == class_count[c][best] &&
                     fold_total[f] < fold_total[best])) {
                    best = f;
                }
            }
            for (const std::size_t row : group_rows[g]) {
                out.fold_of_row[row] = static_cast<int>(best);
            }
            class_count[static_cast<std::size_t>(cls)][best] += group_rows[g].size();
            fold_total[best] += group_rows[g].size();
        }
    }
    return out;
}

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw MetricError("scores and labels must be non-empty and aligned");
    }
    const auto n_pos = static_cast<std::size_t>(
        std::count(labels.begin(), labels.end(), 1));
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw MetricError("ROC needs both classes present");
    }

    RocResult out;
    out.curve.push_back({0.0, 0.0});
    std::size_t tp = 0;
    std::size_t fp = 0;
    double auc = 0.0;
    for (const auto& g : tie_groups(scores, labels)) {
        const double prev_fpr = static_cast<double>(fp) / static_cast<double>(n_neg);
        const double prev_tpr = static_cast<double>(tp) / static_cast<double>(n_pos);
        tp += g.n_pos;
        fp += g.n_neg;
        const double fpr = static_cast<double>(fp) / static_cast<double>(n_neg);
        const double tpr = static_cast<double>(tp) / static_cast<double>(n_pos);
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        out.curve.push_back({fpr, tpr});
    }
    out.auc = auc;
    return out;
}

PrResult pr_ap(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw MetricError("scores and labels must be non-empty and aligned");
    }
    const auto n_pos = static_cast<std::size_t>(
        std::count(labels.begin(), labels.end(), 1));
    if (n_pos == 0) {
        throw MetricError("average precision needs at least one positive");
    }

    PrResult out;
    out.curve.push_back({0.0, 1.0});
    std::size_t tp = 0;
    std::size_t fp = 0;
    double ap = 0.0;
    double prev_recall = 0.0;
    for (const auto& g : tie_groups(scores, labels)) {
        tp += g.n_pos;
        fp += g.n_neg;
        const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
        const double precision =
            static_cast<double>(tp) / static_cast<double>(tp + fp);
        ap += (recall - prev_recall) * precision;
        out.curve.push_back({recall, precision});
        prev_recall = recall;
    }
    out.average_precision = ap;
    return out;
}

PrecisionRecall precision_recall_at(std::span<const double> scores,
                                    std::span<const int> labels, double threshold) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw MetricError("scores and labels must be non-empty and aligned");
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        if (predicted && labels[i]) ++tp;
        else if (predicted) ++fp;
        else if (labels[i]) ++fn;
    }
    PrecisionRecall pr;
    if (tp + fp == 0) {
        pr.no_predicted_positives = true;
        pr.precision = 0.0;
    } else {
        pr.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    pr.recall = tp + fn == 0 ? 0.0
                             : static_cast<double>(tp) / static_cast<double>(tp + fn);
    return pr;
}

std::vector<std::size_t> resolve_subset(const LabeledDataset& dataset,
                                        const std::string& subset) {
    if (subset == "all") {
        std::vector<std::size_t> cols(dataset.dim());
        std::iota(cols.begin(), cols.end(), 0);
        return cols;
    }

    std::vector<std::string> blocks;
    if (subset == "time" || subset == "spectral" || subset == "cepstral" ||
        subset == "tonal") {
        blocks = FeatureLayout::category_blocks(subset);
    } else {
        blocks = {subset};
    }

    // Column names are "<block>.<dim>.<stat>", optionally prefixed "b:" or
    // "c:" in BC datasets.
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < dataset.column_names.size(); ++i) {
        std::string name = dataset.column_names[i];
        if (name.size() > 2 && (name[0] == 'b' || name[0] == 'c') && name[1] == ':') {
            name = name.substr(2);
        }
        const auto dot = name.find('.');
        const std::string block = dot == std::string::npos ? name : name.substr(0, dot);
        if (std::find(blocks.begin(), blocks.end(), block) != blocks.end()) {
            cols.push_back(i);
        }
    }
    if (cols.empty()) {
        throw ParameterError("subset '" + subset + "' matches no dataset columns");
    }
    return cols;
}

CvResult cross_validate(const LabeledDataset& dataset, ModelKind kind,
                        const std::string& subset, int n_folds, std::uint64_t seed,
                        const ModelHyperparams& hyper, double threshold) {
    const auto cols = resolve_subset(dataset, subset);
    const FoldAssignment folds =
        stratified_folds(dataset.labels, dataset.participant_ids, n_folds, seed);

    CvResult result;
    for (int fold = 0; fold < n_folds; ++fold) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < dataset.n_samples(); ++i) {
            (folds.fold_of_row[i] == fold ? test_rows : train_rows).push_back(i);
        }

        auto slice = [&](const std::vector<std::size_t>& rows) {
            Matrix m(rows.size(), cols.size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                for (std::size_t c = 0; c < cols.size(); ++c) {
                    m(r, c) = dataset.rows(rows[r], cols[c]);
                }
            }
            return m;
        };

        const Matrix train_x = slice(train_rows);
        const Matrix test_x = slice(test_rows);
        std::vector<int> train_y, test_y;
        for (const std::size_t r : train_rows) train_y.push_back(dataset.labels[r]);
        for (const std::size_t r : test_rows) test_y.push_back(dataset.labels[r]);

        const TrainedModel model =
            train(kind, train_x, train_y, hyper,
                  Rng::derive(seed, 100 + static_cast<std::uint64_t>(fold)),
                  dataset.layout_version);
        const std::vector<double> scores = model.score_rows(test_x);

        FoldMetrics metrics;
        metrics.roc = roc_auc(scores, test_y);
        metrics.auc = metrics.roc.auc;
        metrics.pr = pr_ap(scores, test_y);
        metrics.ap = metrics.pr.average_precision;
        const PrecisionRecall pr = precision_recall_at(scores, test_y, threshold);
        metrics.precision = pr.precision;
        metrics.recall = pr.recall;
        result.folds.push_back(std::move(metrics));
    }

    std::vector<double> aucs, aps, precisions, recalls;
    for (const auto& f : result.folds) {
        aucs.push_back(f.auc);
        aps.push_back(f.ap);
        precisions.push_back(f.precision);
        recalls.push_back(f.recall);
    }
    const auto auc_ms = mean_std(aucs);
    const auto ap_ms = mean_std(aps);
    const auto p_ms = mean_std(precisions);
    const auto r_ms = mean_std(recalls);
    result.mean_auc = auc_ms.mean;
    result.std_auc = auc_ms.std;
    result.mean_ap = ap_ms.mean;
    result.std_ap = ap_ms.std;
    result.mean_precision = p_ms.mean;
    result.std_precision = p_ms.std;
    result.mean_recall = r_ms.mean;
    result.std_recall = r_ms.std;
    return result;
}

std::vector<RankingEntry> rank_features(const LabeledDataset& dataset,
                                        const std::vector<ModelKind>& kinds,
                                        const std::vector<std::string>& subsets,
                                        int n_folds, std::uint64_t seed,
                                        const ModelHyperparams& hyper,
                                        double threshold) {
    std::vector<RankingEntry> entries;
    for (const auto& subset : subsets) {
        RankingEntry entry;
        entry.subset = subset;
        double acc = 0.0;
        for (const ModelKind kind : kinds) {
            const CvResult cv =
                cross_validate(dataset, kind, subset, n_folds, seed, hyper, threshold);
            entry.per_model_mean[model_kind_name(kind)] = cv.mean_auc;
            acc += cv.mean_auc;
        }
        entry.cross_model_mean = acc / static_cast<double>(kinds.size());
        entries.push_back(std::move(entry));
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.cross_model_mean != b.cross_model_mean) {
            return a.cross_model_mean > b.cross_model_mean;
        }
        return a.subset < b.subset;
    });
    return entries;
}

double f_distribution_sf(double f, int df1, int df2) {
    if (f <= 0.0) {
        return 1.0;
    }
    const double x = static_cast<double>(df2) / (df2 + df1 * f);
    return ibeta_reg(df2 / 2.0, df1 / 2.0, x);
}

AnovaResult rm_anova(const Matrix& metric_matrix) {
    const std::size_t subjects = metric_matrix.rows();
    const std::size_t conditions = metric_matrix.cols();
    if (subjects < 2 || conditions < 2) {
        throw ParameterError("rm_anova needs at least 2 subjects and 2 conditions");
    }

    double grand = 0.0;
    for (const double v : metric_matrix.data()) {
        grand += v;
    }
    grand /= static_cast<double>(subjects * conditions);

    double ss_total = 0.0;
    for (const double v : metric_matrix.data()) {
        ss_total += (v - grand) * (v - grand);
    }

    double ss_cond = 0.0;
    for (std::size_t c = 0; c < conditions; ++c) {
        double mean = 0.0;
        for (std::size_t s = 0; s < subjects; ++s) {
            mean += metric_matrix(s, c);
        }
        mean /= static_cast<double>(subjects);
        ss_cond += static_cast<double>(subjects) * (mean - grand) * (mean - grand);
    }

    double ss_subj = 0.0;
    for (std::size_t s = 0; s < subjects; ++s) {
        double mean = 0.0;
        for (std::size_t c = 0; c < conditions; ++c) {
            mean += metric_matrix(s, c);
        }
        mean /= static_cast<double>(conditions);
        ss_subj += static_cast<double>(conditions) * (mean - grand) * (mean - grand);
    }

    const double ss_error = std::max(0.0, ss_total - ss_cond - ss_subj);
    const int df_cond = static_cast<int>(conditions) - 1;
    const int df_error = df_cond * (static_cast<int>(subjects) - 1);

    AnovaResult result;
    result.df_conditions = df_cond;
    result.df_error = df_error;

    const double scale = std::max(ss_total, 1e-300);
    if (ss_cond / scale < 1e-14) {
        result.f_stat = 0.0;
        result.p_value = 1.0;
        return result;
    }
    const double ms_cond = ss_cond / df_cond;
    const double ms_error = ss_error / df_error;
    if (ms_error <= 0.0 || ss_error / scale < 1e-14) {
        throw DegenerateVarianceError("zero error variance in repeated-measures ANOVA");
    }
    result.f_stat = ms_cond / ms_error;
    result.p_value = f_distribution_sf(result.f_stat, df_cond, df_error);
    return result;
}

}  // namespace respire
