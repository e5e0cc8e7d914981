// Exercises the shared-library surface exactly as an external client would:
// only respire.h, no C++ headers from the core.

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "respire.h"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const char* what) {
    if (!ok) {
        ++g_failures;
        std::fprintf(stderr, "FAIL: %s (last error: %s)\n", what,
                     respire_last_error());
    }
}

std::string fresh_dir(const char* name) {
    const fs::path p = fs::temp_directory_path() / (std::string("respire_capi_") + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

}  // namespace

int main() {
    check(std::strlen(respire_version()) > 0, "version string");

    // --- config handling -----------------------------------------------
    respire_config* cfg = respire_config_create();
    check(cfg != nullptr, "config_create");

    check(respire_config_set(cfg, "seed", "123") == RESPIRE_OK, "set seed");
    check(respire_config_set(cfg, "synth_n", "4") == RESPIRE_OK, "set synth_n");
    check(respire_config_set(cfg, "n_folds", "2") == RESPIRE_OK, "set n_folds");
    check(respire_config_set(cfg, "models", "lr") == RESPIRE_OK, "set models");
    check(respire_config_set(cfg, "subsets", "time,cepstral") == RESPIRE_OK,
          "set subsets");
    check(respire_config_set(cfg, "sample_types", "b") == RESPIRE_OK,
          "set sample_types");

    check(respire_config_set(cfg, "bogus_key", "1") == RESPIRE_ERR_PARAMETER,
          "unknown key yields RESPIRE_ERR_PARAMETER");
    check(std::strlen(respire_last_error()) > 0, "last_error populated on failure");
    check(respire_config_set(nullptr, "seed", "1") == RESPIRE_ERR_INVALID_ARG,
          "null config yields RESPIRE_ERR_INVALID_ARG");

    char buffer[64];
    check(respire_config_get(cfg, "seed", buffer, sizeof buffer) == RESPIRE_OK,
          "config_get");
    check(std::string(buffer) == "123", "config_get returns the stored value");

    check(respire_feature_vector_size(cfg) == 812, "feature vector size is 812");

    // --- synth -> extract -> rank through the C surface ------------------
    const std::string corpus = fresh_dir("corpus");
    const std::string data = fresh_dir("data");
    const std::string ranked = fresh_dir("ranked");

    int n_participants = 0;
    check(respire_synth(cfg, corpus.c_str(), &n_participants) == RESPIRE_OK, "synth");
    check(n_participants == 8, "synth participant count");

    const std::string manifest = corpus + "/manifest.csv";
    int n_ok = 0, n_skipped = 0;
    check(respire_extract(cfg, manifest.c_str(), data.c_str(), &n_ok, &n_skipped) ==
              RESPIRE_OK,
          "extract");
    check(n_ok == 8 && n_skipped == 0, "extract counts");
    check(fs::exists(data + "/dataset_b.csv"), "dataset_b.csv written");
    check(fs::exists(data + "/dataset_bc.csv"), "dataset_bc.csv written");

    check(respire_rank(cfg, data.c_str(), ranked.c_str()) == RESPIRE_OK, "rank");
    check(fs::exists(ranked + "/report.json"), "report.json written");
    check(fs::exists(ranked + "/table.txt"), "table.txt written");

    // --- per-file feature vector -----------------------------------------
    std::vector<double> out(812);
    size_t out_len = 0;
    const std::string wav = corpus + "/wav/p0000_breath.wav";
    check(respire_feature_vector_from_wav(cfg, wav.c_str(), out.data(), out.size(),
                                          &out_len) == RESPIRE_OK,
          "feature_vector_from_wav");
    check(out_len == 812, "feature vector length");

    check(respire_feature_vector_from_wav(cfg, wav.c_str(), out.data(), 10, &out_len) ==
              RESPIRE_ERR_PARAMETER,
          "undersized buffer rejected");

    // --- error code mapping ----------------------------------------------
    check(respire_extract(cfg, (corpus + "/nope.csv").c_str(), data.c_str(), nullptr,
                          nullptr) == RESPIRE_ERR_INGEST,
          "missing manifest maps to RESPIRE_ERR_INGEST");
    check(respire_feature_vector_from_wav(cfg, (corpus + "/nope.wav").c_str(),
                                          out.data(), out.size(), nullptr) ==
              RESPIRE_ERR_IO,
          "missing wav maps to RESPIRE_ERR_IO");
    check(respire_rank(cfg, fresh_dir("empty").c_str(), ranked.c_str()) ==
              RESPIRE_ERR_INGEST,
          "empty data dir maps to RESPIRE_ERR_INGEST");
    check(respire_config_load_file(cfg, (corpus + "/nope.cfg").c_str()) ==
              RESPIRE_ERR_IO,
          "missing config file maps to RESPIRE_ERR_IO");

    respire_config_free(cfg);
    respire_config_free(nullptr);  // must be a no-op

    if (g_failures == 0) {
        std::printf("capi: all checks passed\n");
    }
    return g_failures == 0 ? 0 : 1;
}
