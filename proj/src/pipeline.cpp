#include "respire/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

namespace respire {

namespace {

namespace fs = std::filesystem;

// Runs fn(0..n_tasks) across workers; rethrows the first captured exception.
void parallel_for(std::size_t n_tasks, int workers,
                  const std::function<void(std::size_t)>& fn) {
    const int n_threads =
        std::max(1, std::min<int>(workers, static_cast<int>(n_tasks)));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_tasks) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        if (!std::isalnum(static_cast<unsigned char>(c))) {
            c = '_';
        }
    }
    return out;
}

void write_curves_csv(const GridCell& cell, const fs::path& dir,
                      std::vector<std::string>& paths) {
    const std::string stem = sanitize(cell.dataset_name) + "_" +
                             sample_type_name(cell.sample_type) + "_" + cell.model +
                             "_" + sanitize(cell.subset);
    for (std::size_t fold = 0; fold < cell.cv.folds.size(); ++fold) {
        const auto& metrics = cell.cv.folds[fold];
        {
            const fs::path p = dir / (stem + "_fold" + std::to_string(fold) + "_roc.csv");
            std::ofstream out(p);
            out << "fpr,tpr\n";
            for (const auto& pt : metrics.roc.curve) {
                out << pt.fpr << "," << pt.tpr << "\n";
            }
            paths.push_back(p.string());
        }
        {
            const fs::path p = dir / (stem + "_fold" + std::to_string(fold) + "_pr.csv");
            std::ofstream out(p);
            out << "recall,precision\n";
            for (const auto& pt : metrics.pr.curve) {
                out << pt.recall << "," << pt.precision << "\n";
            }
            paths.push_back(p.string());
        }
    }
}

// --- minimal SVG line plots -------------------------------------------------

struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

void write_svg_panel(const fs::path& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series, bool diagonal) {
    const int w = 480, h = 400, ml = 56, mr = 16, mt = 36, mb = 44;
    const double pw = w - ml - mr;
    const double ph = h - mt - mb;
    auto px = [&](double x) { return ml + x * pw; };
    auto py = [&](double y) { return mt + (1.0 - y) * ph; };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
    std::ofstream out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << h << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" "
           "font-size=\"14\">" << title << "</text>\n";
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = i / 4.0;
        out << "<text x=\"" << px(v) << "\" y=\"" << h - mb + 16
            << "\" text-anchor=\"middle\" font-size=\"10\">" << v << "</text>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(v) + 3
            << "\" text-anchor=\"end\" font-size=\"10\">" << v << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << h - 8
        << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    out << "<text x=\"14\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
        << mt + ph / 2 << ")\">" << y_label << "</text>\n";
    if (diagonal) {
        out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1)
            << "\" y2=\"" << py(1)
            << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[s].points) {
            out << px(x) << "," << py(y) << " ";
        }
        out << "\"/>\n";
        out << "<text x=\"" << w - mr - 8 << "\" y=\"" << mt + 16 + 14 * s
            << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">"
            << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
}

// Mean curve over folds, interpolated on a common grid.
std::vector<std::pair<double, double>> mean_roc_curve(const CvResult& cv) {
    std::vector<std::pair<double, double>> out;
    for (int g = 0; g <= 100; ++g) {
        const double x = g / 100.0;
        double acc = 0.0;
        for (const auto& fold : cv.folds) {
            double y = 0.0;
            const auto& curve = fold.roc.curve;
            for (std::size_t i = 1; i < curve.size(); ++i) {
                if (curve[i].fpr >= x) {
                    const double x0 = curve[i - 1].fpr, x1 = curve[i].fpr;
                    const double y0 = curve[i - 1].tpr, y1 = curve[i].tpr;
                    y = x1 > x0 ? y0 + (y1 - y0) * (x - x0) / (x1 - x0) : y1;
                    break;
                }
                y = curve[i].tpr;
            }
            acc += y;
        }
        out.emplace_back(x, acc / static_cast<double>(cv.folds.size()));
    }
    return out;
}

std::vector<std::pair<double, double>> mean_pr_curve(const CvResult& cv) {
    std::vector<std::pair<double, double>> out;
    for (int g = 0; g <= 100; ++g) {
        const double x = g / 100.0;
        double acc = 0.0;
        for (const auto& fold : cv.folds) {
            const auto& curve = fold.pr.curve;
            double y = curve.back().precision;
            for (std::size_t i = 0; i < curve.size(); ++i) {
                if (curve[i].recall >= x) {
                    y = curve[i].precision;
                    break;
                }
            }
            acc += y;
        }
        out.emplace_back(x, acc / static_cast<double>(cv.folds.size()));
    }
    return out;
}

nlohmann::json cv_to_json(const CvResult& cv, bool with_curves) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : cv.folds) {
        nlohmann::json jf{{"auc", f.auc},
                          {"ap", f.ap},
                          {"precision", f.precision},
                          {"recall", f.recall}};
        if (with_curves) {
            nlohmann::json roc = nlohmann::json::array();
            for (const auto& p : f.roc.curve) {
                roc.push_back({p.fpr, p.tpr});
            }
            nlohmann::json pr = nlohmann::json::array();
            for (const auto& p : f.pr.curve) {
                pr.push_back({p.recall, p.precision});
            }
            jf["roc_curve"] = roc;
            jf["pr_curve"] = pr;
        }
        folds.push_back(jf);
    }
    return {{"mean_auc", cv.mean_auc},
            {"std_auc", cv.std_auc},
            {"mean_ap", cv.mean_ap},
            {"std_ap", cv.std_ap},
            {"mean_precision", cv.mean_precision},
            {"std_precision", cv.std_precision},
            {"mean_recall", cv.mean_recall},
            {"std_recall", cv.std_recall},
            {"folds", folds}};
}

}  // namespace

std::string format_mean_std(double mean, double std) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f(.%02d)", mean * 100.0,
                  static_cast<int>(std::lround(std * 100.0)));
    return buf;
}

ExtractResult run_extract(const RunConfig& config, const std::string& manifest_path,
                          const std::string& out_dir) {
    config.validate();
    const auto records = load_manifest(manifest_path);
    if (records.empty()) {
        throw IngestError("manifest has no records: " + manifest_path);
    }
    fs::create_directories(out_dir);

    const FeatureLayout layout = FeatureLayout::from_config(config);

    struct ParticipantVectors {
        bool ok = false;
        std::string reason;
        FeatureVector breath;
        FeatureVector cough;
    };
    std::vector<ParticipantVectors> built(records.size());

    parallel_for(records.size(), effective_workers(config), [&](std::size_t i) {
        const auto& rec = records[i];
        try {
            built[i].breath = build_feature_vector(read_wav(rec.breath_path), config,
                                                   SampleKind::breath,
                                                   rec.participant_id);
            built[i].cough = build_feature_vector(read_wav(rec.cough_path), config,
                                                  SampleKind::cough,
                                                  rec.participant_id);
            built[i].ok = true;
        } catch (const std::exception& e) {
            built[i].reason = e.what();
        }
    });

    ExtractResult result;
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (built[i].ok) {
            kept.push_back(i);
        } else {
            ++result.n_skipped;
            result.skipped.push_back(records[i].participant_id + ": " +
                                     built[i].reason);
        }
    }
    result.n_extracted = static_cast<int>(kept.size());
    if (result.n_skipped * 2 > static_cast<int>(records.size())) {
        std::string msg = "more than half of the manifest failed extraction (" +
                          std::to_string(result.n_skipped) + "/" +
                          std::to_string(records.size()) + ")";
        for (const auto& s : result.skipped) {
            msg += "\n  " + s;
        }
        throw IngestError(msg);
    }

    const std::size_t dim = layout.size();
    auto make_dataset = [&](SampleType type) {
        LabeledDataset ds;
        ds.sample_type = type;
        ds.layout_version = layout.version();
        if (type == SampleType::BC) {
            ds.column_names.reserve(dim * 2);
            for (const auto& n : layout.column_names()) {
                ds.column_names.push_back("b:" + n);
            }
            for (const auto& n : layout.column_names()) {
                ds.column_names.push_back("c:" + n);
            }
            ds.rows = Matrix(kept.size(), dim * 2);
        } else {
            ds.column_names = layout.column_names();
            ds.rows = Matrix(kept.size(), dim);
        }
        for (std::size_t r = 0; r < kept.size(); ++r) {
            const auto& pv = built[kept[r]];
            const auto& rec = records[kept[r]];
            ds.participant_ids.push_back(rec.participant_id);
            ds.labels.push_back(rec.label);
            auto row = ds.rows.row(r);
            if (type == SampleType::B) {
                std::copy(pv.breath.values.begin(), pv.breath.values.end(), row.begin());
            } else if (type == SampleType::C) {
                std::copy(pv.cough.values.begin(), pv.cough.values.end(), row.begin());
            } else {
                const auto bc = concat_bc(pv.breath, pv.cough);
                std::copy(bc.begin(), bc.end(), row.begin());
            }
        }
        return ds;
    };

    const fs::path out(out_dir);
    const LabeledDataset b = make_dataset(SampleType::B);
    const LabeledDataset c = make_dataset(SampleType::C);
    const LabeledDataset bc = make_dataset(SampleType::BC);
    result.dataset_b_path = (out / "dataset_b.csv").string();
    result.dataset_c_path = (out / "dataset_c.csv").string();
    result.dataset_bc_path = (out / "dataset_bc.csv").string();
    write_dataset(b, result.dataset_b_path);
    write_dataset(c, result.dataset_c_path);
    write_dataset(bc, result.dataset_bc_path);
    return result;
}

SynthResult run_synth(const RunConfig& config, const std::string& out_dir) {
    config.validate();
    SynthSpec spec;
    spec.n_per_class = config.synth_n;
    spec.seed = config.seed;
    spec.sample_rate = config.sample_rate;
    spec.min_dur_s = config.synth_min_s;
    spec.max_dur_s = config.synth_max_s;
    spec.covid = ClassRecipe::parse(config.synth_covid);
    spec.healthy = ClassRecipe::parse(config.synth_healthy);
    return synth_corpus(spec, out_dir);
}

EvalReport evaluate_grid(const RunConfig& config,
                         const std::vector<LabeledDataset>& datasets) {
    config.validate();
    if (datasets.empty()) {
        throw ParameterError("no datasets to evaluate");
    }

    EvalReport report;
    nlohmann::json cfg;
    for (const auto& [k, v] : config.to_map()) {
        cfg[k] = v;
    }
    report.config = cfg;

    report.grid.resize(datasets.size() * config.models.size() * config.subsets.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        for (std::size_t m = 0; m < config.models.size(); ++m) {
            for (std::size_t s = 0; s < config.subsets.size(); ++s) {
                const std::size_t slot =
                    (d * config.models.size() + m) * config.subsets.size() + s;
                tasks.emplace_back([&, d, m, s, slot] {
                    GridCell cell;
                    cell.dataset_name = std::string("dataset_") +
                                        sample_type_name(datasets[d].sample_type);
                    cell.sample_type = datasets[d].sample_type;
                    cell.model = config.models[m];
                    cell.subset = config.subsets[s];
                    cell.cv = cross_validate(
                        datasets[d], model_kind_from_string(config.models[m]),
                        config.subsets[s], config.n_folds, config.seed, config.hyper,
                        config.decision_threshold);
                    report.grid[slot] = std::move(cell);
                });
            }
        }
    }
    parallel_for(tasks.size(), effective_workers(config), [&](std::size_t i) {
        tasks[i]();
    });

    // Cross-model ranking of subsets, pooled over sample types.
    std::map<std::string, std::pair<double, int>> pooled;
    std::map<std::string, std::map<std::string, std::pair<double, int>>> per_model;
    for (const auto& cell : report.grid) {
        auto& [sum, count] = pooled[cell.subset];
        sum += cell.cv.mean_auc;
        ++count;
        auto& [msum, mcount] = per_model[cell.subset][cell.model];
        msum += cell.cv.mean_auc;
        ++mcount;
    }
    for (const auto& [subset, agg] : pooled) {
        RankingEntry entry;
        entry.subset = subset;
        entry.cross_model_mean = agg.first / agg.second;
        for (const auto& [model, magg] : per_model[subset]) {
            entry.per_model_mean[model] = magg.first / magg.second;
        }
        report.ranking.push_back(std::move(entry));
    }
    std::sort(report.ranking.begin(), report.ranking.end(),
              [](const auto& a, const auto& b) {
                  if (a.cross_model_mean != b.cross_model_mean) {
                      return a.cross_model_mean > b.cross_model_mean;
                  }
                  return a.subset < b.subset;
              });

    // Repeated-measures ANOVA over fold AUCs: subsets as conditions (per
    // dataset and model), and sample types as conditions (per model and
    // subset) when several datasets are present.
    if (config.subsets.size() > 1) {
        nlohmann::json by_subset = nlohmann::json::array();
        for (std::size_t d = 0; d < datasets.size(); ++d) {
            for (std::size_t mi = 0; mi < config.models.size(); ++mi) {
                Matrix m(static_cast<std::size_t>(config.n_folds),
                         config.subsets.size());
                for (std::size_t s = 0; s < config.subsets.size(); ++s) {
                    const auto& cell =
                        report.grid[(d * config.models.size() + mi) *
                                        config.subsets.size() +
                                    s];
                    for (int f = 0; f < config.n_folds; ++f) {
                        m(static_cast<std::size_t>(f), s) =
                            cell.cv.folds[static_cast<std::size_t>(f)].auc;
                    }
                }
                const std::string dataset_name =
                    std::string("dataset_") +
                    sample_type_name(datasets[d].sample_type);
                try {
                    const AnovaResult a = rm_anova(m);
                    by_subset.push_back({{"dataset", dataset_name},
                                         {"model", config.models[mi]},
                                         {"F", a.f_stat},
                                         {"p", a.p_value},
                                         {"df", {a.df_conditions, a.df_error}}});
                } catch (const DegenerateVarianceError&) {
                    by_subset.push_back({{"dataset", dataset_name},
                                         {"model", config.models[mi]},
                                         {"degenerate", true}});
                }
            }
        }
        report.anova["by_subset"] = by_subset;
    }

    if (datasets.size() > 1) {
        nlohmann::json by_type = nlohmann::json::array();
        for (std::size_t m = 0; m < config.models.size(); ++m) {
            for (std::size_t s = 0; s < config.subsets.size(); ++s) {
                Matrix mat(static_cast<std::size_t>(config.n_folds), datasets.size());
                for (std::size_t d = 0; d < datasets.size(); ++d) {
                    const auto& cell =
                        report.grid[(d * config.models.size() + m) *
                                        config.subsets.size() +
                                    s];
                    for (int f = 0; f < config.n_folds; ++f) {
                        mat(static_cast<std::size_t>(f), d) =
                            cell.cv.folds[static_cast<std::size_t>(f)].auc;
                    }
                }
                try {
                    const AnovaResult a = rm_anova(mat);
                    by_type.push_back({{"model", config.models[m]},
                                       {"subset", config.subsets[s]},
                                       {"F", a.f_stat},
                                       {"p", a.p_value},
                                       {"df", {a.df_conditions, a.df_error}}});
                } catch (const DegenerateVarianceError&) {
                    by_type.push_back({{"model", config.models[m]},
                                       {"subset", config.subsets[s]},
                                       {"degenerate", true}});
                }
            }
        }
        report.anova["by_sample_type"] = by_type;
    }
    return report;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j;
    j["format"] = "respire-report";
    j["format_version"] = 1;
    j["config"] = config;
    nlohmann::json jgrid = nlohmann::json::array();
    for (const auto& cell : grid) {
        jgrid.push_back({{"dataset", cell.dataset_name},
                         {"sample_type", sample_type_name(cell.sample_type)},
                         {"model", cell.model},
                         {"subset", cell.subset},
                         {"metrics", cv_to_json(cell.cv, true)}});
    }
    j["grid"] = jgrid;
    nlohmann::json jrank = nlohmann::json::array();
    for (const auto& entry : ranking) {
        jrank.push_back({{"subset", entry.subset},
                         {"cross_model_mean_auc", entry.cross_model_mean},
                         {"per_model_mean_auc", entry.per_model_mean}});
    }
    j["ranking"] = jrank;
    j["anova"] = anova;
    return j;
}

RankResult run_rank(const RunConfig& config, const std::string& data_dir,
                    const std::string& out_dir) {
    config.validate();

    std::vector<LabeledDataset> datasets;
    for (const auto& type : config.sample_types) {
        const fs::path p = fs::path(data_dir) / ("dataset_" + type + ".csv");
        if (!fs::exists(p)) {
            throw IngestError("missing dataset file " + p.string());
        }
        datasets.push_back(read_dataset(p.string()));
    }

    EvalReport report = evaluate_grid(config, datasets);

    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    RankResult result;

    result.report_path = (out / "report.json").string();
    {
        std::ofstream f(result.report_path);
        f << report.to_json().dump(2) << "\n";
    }

    // Table: rows dataset x subset, columns models, cells mean(std).
    result.table_path = (out / "table.txt").string();
    {
        std::ofstream f(result.table_path);
        f << config.n_folds << "-fold CV ROC-AUC as mean(std)\n\n";
        char head[256];
        std::snprintf(head, sizeof head, "%-12s %-10s", "Dataset", "Subset");
        f << head;
        for (const auto& model : config.models) {
            std::snprintf(head, sizeof head, " %12s", model.c_str());
            f << head;
        }
        f << "\n";
        for (const auto& dataset : datasets) {
            for (const auto& subset : config.subsets) {
                char row[64];
                std::snprintf(row, sizeof row, "%-12s %-10s",
                              (std::string("dataset_") +
                               sample_type_name(dataset.sample_type))
                                  .c_str(),
                              subset.c_str());
                f << row;
                for (const auto& model : config.models) {
                    const auto it = std::find_if(
                        report.grid.begin(), report.grid.end(), [&](const GridCell& c) {
                            return c.sample_type == dataset.sample_type &&
                                   c.model == model && c.subset == subset;
                        });
                    std::snprintf(row, sizeof row, " %12s",
                                  format_mean_std(it->cv.mean_auc, it->cv.std_auc)
                                      .c_str());
                    f << row;
                }
                f << "\n";
            }
        }
        f << "\nSubset ranking by cross-model mean ROC-AUC:\n";
        for (std::size_t i = 0; i < report.ranking.size(); ++i) {
            char row[128];
            std::snprintf(row, sizeof row, "  %zu. %-10s %.4f\n", i + 1,
                          report.ranking[i].subset.c_str(),
                          report.ranking[i].cross_model_mean);
            f << row;
        }
    }

    const fs::path curve_dir = out / "curves";
    fs::create_directories(curve_dir);
    for (const auto& cell : report.grid) {
        write_curves_csv(cell, curve_dir, result.curve_paths);
    }

    if (config.plots) {
        const fs::path plot_dir = out / "plots";
        fs::create_directories(plot_dir);
        for (const auto& dataset : datasets) {
            // One ROC and one PR panel per dataset over the full-grid cells
            // of the first subset, mean curve per model.
            std::vector<SvgSeries> roc_series, pr_series;
            for (const auto& model : config.models) {
                const auto it = std::find_if(
                    report.grid.begin(), report.grid.end(), [&](const GridCell& c) {
                        return c.sample_type == dataset.sample_type &&
                               c.model == model && c.subset == config.subsets.front();
                    });
                char label[64];
                std::snprintf(label, sizeof label, "%s (AUC %.2f)", model.c_str(),
                              it->cv.mean_auc);
                roc_series.push_back({label, mean_roc_curve(it->cv)});
                std::snprintf(label, sizeof label, "%s (AP %.2f)", model.c_str(),
                              it->cv.mean_ap);
                pr_series.push_back({label, mean_pr_curve(it->cv)});
            }
            const std::string type = sample_type_name(dataset.sample_type);
            const fs::path roc_path = plot_dir / ("roc_" + type + ".svg");
            const fs::path pr_path = plot_dir / ("pr_" + type + ".svg");
            write_svg_panel(roc_path,
                            "Mean ROC over " + std::to_string(config.n_folds) +
                                "-fold CV (" + type + ", subset " +
                                config.subsets.front() + ")",
                            "False positive rate", "True positive rate", roc_series,
                            true);
            write_svg_panel(pr_path,
                            "Mean PR over " + std::to_string(config.n_folds) +
                                "-fold CV (" + type + ", subset " +
                                config.subsets.front() + ")",
                            "Recall", "Precision", pr_series, false);
            result.plot_paths.push_back(roc_path.string());
            result.plot_paths.push_back(pr_path.string());
        }
    }
    return result;
}

}  // namespace respire
