// Batch CLI over the respire C API: synth, extract, and rank subcommands.
// Errors leave a machine-readable JSON object on stderr and the respire
// status code as the exit code.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "respire.h"

namespace {

struct KeyValue {
    std::string key;
    std::string value;
};

int fail(respire_status status, const std::string& where) {
    std::string message = respire_last_error();
    for (char& c : message) {
        if (c == '"') c = '\'';
        if (c == '\n') c = ' ';
    }
    std::fprintf(stderr,
                 "{\"error\":{\"code\":%d,\"command\":\"%s\",\"message\":\"%s\"}}\n",
                 static_cast<int>(status), where.c_str(), message.c_str());
    return static_cast<int>(status);
}

int apply(respire_config* cfg, const std::vector<KeyValue>& pairs,
          const std::string& where) {
    for (const auto& kv : pairs) {
        const respire_status s =
            respire_config_set(cfg, kv.key.c_str(), kv.value.c_str());
        if (s != RESPIRE_OK) {
            return fail(s, where);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"respire: respiratory-audio feature extraction and model ranking"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--set", overrides, "config override key=value (repeatable)");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic labeled corpus");
    std::string synth_out = "synth_corpus";
    int synth_n = -1;
    std::string synth_covid, synth_healthy;
    std::string seed_str;
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--n", synth_n, "participants per class");
    synth->add_option("--covid", synth_covid, "covid class recipe");
    synth->add_option("--healthy", synth_healthy, "healthy class recipe");

    // extract
    auto* extract = app.add_subcommand("extract", "build dataset CSVs from a manifest");
    std::string manifest_path;
    std::string extract_out = "datasets";
    extract->add_option("--manifest", manifest_path, "manifest CSV")->required();
    extract->add_option("--out", extract_out, "output directory");

    // rank
    auto* rank = app.add_subcommand("rank", "cross-validated model/subset ranking");
    std::string data_dir;
    std::string rank_out = "rank_out";
    std::string models, subsets, sample_types;
    int folds = -1;
    bool plots = false;
    rank->add_option("--data", data_dir, "directory holding dataset_*.csv")->required();
    rank->add_option("--out", rank_out, "output directory");
    rank->add_option("--models", models, "comma list: ada,knn,lr,rf,svm");
    rank->add_option("--subsets", subsets, "comma list of subsets/categories");
    rank->add_option("--sample-types", sample_types, "comma list: b,c,bc");
    rank->add_option("--folds", folds, "number of CV folds");
    rank->add_flag("--plots", plots, "emit SVG ROC/PR panels");

    app.add_option("--seed", seed_str, "master random seed");
    std::string workers_str;
    app.add_option("--workers", workers_str, "worker thread count");

    CLI11_PARSE(app, argc, argv);

    respire_config* cfg = respire_config_create();
    if (!cfg) {
        std::fprintf(stderr, "{\"error\":{\"code\":15,\"message\":\"out of memory\"}}\n");
        return RESPIRE_ERR_INTERNAL;
    }
    struct ConfigGuard {
        respire_config* c;
        ~ConfigGuard() { respire_config_free(c); }
    } guard{cfg};

    if (!config_path.empty()) {
        const respire_status s = respire_config_load_file(cfg, config_path.c_str());
        if (s != RESPIRE_OK) {
            return fail(s, "config");
        }
    }

    std::vector<KeyValue> pairs;
    if (!seed_str.empty()) pairs.push_back({"seed", seed_str});
    if (!workers_str.empty()) pairs.push_back({"workers", workers_str});
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr,
                         "{\"error\":{\"code\":5,\"message\":\"--set expects "
                         "key=value, got '%s'\"}}\n",
                         kv.c_str());
            return RESPIRE_ERR_PARAMETER;
        }
        pairs.push_back({kv.substr(0, eq), kv.substr(eq + 1)});
    }

    if (synth->parsed()) {
        if (synth_n > 0) pairs.push_back({"synth_n", std::to_string(synth_n)});
        if (!synth_covid.empty()) pairs.push_back({"synth_covid", synth_covid});
        if (!synth_healthy.empty()) pairs.push_back({"synth_healthy", synth_healthy});
        if (const int rc = apply(cfg, pairs, "synth")) return rc;

        int n_participants = 0;
        const respire_status s = respire_synth(cfg, synth_out.c_str(), &n_participants);
        if (s != RESPIRE_OK) {
            return fail(s, "synth");
        }
        std::printf("synth: wrote %d participants under %s\n", n_participants,
                    synth_out.c_str());
        return 0;
    }

    if (extract->parsed()) {
        if (const int rc = apply(cfg, pairs, "extract")) return rc;
        int n_ok = 0, n_skipped = 0;
        const respire_status s = respire_extract(cfg, manifest_path.c_str(),
                                                 extract_out.c_str(), &n_ok, &n_skipped);
        if (s != RESPIRE_OK) {
            return fail(s, "extract");
        }
        std::printf("extract: %d participants extracted, %d skipped, datasets in %s\n",
                    n_ok, n_skipped, extract_out.c_str());
        return 0;
    }

    // rank
    if (!models.empty()) pairs.push_back({"models", models});
    if (!subsets.empty()) pairs.push_back({"subsets", subsets});
    if (!sample_types.empty()) pairs.push_back({"sample_types", sample_types});
    if (folds > 0) pairs.push_back({"n_folds", std::to_string(folds)});
    if (plots) pairs.push_back({"plots", "1"});
    if (const int rc = apply(cfg, pairs, "rank")) return rc;

    const respire_status s = respire_rank(cfg, data_dir.c_str(), rank_out.c_str());
    if (s != RESPIRE_OK) {
        return fail(s, "rank");
    }
    std::printf("rank: report written under %s\n", rank_out.c_str());
    return 0;
}
