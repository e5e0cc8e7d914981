#include "respire.h"

#include <algorithm>
#include <cstring>
#include <string>

#include "respire/config.hpp"
#include "respire/pipeline.hpp"
#include "respire/vectorize.hpp"

namespace {

thread_local std::string g_last_error;

respire_status status_of(respire::ErrorCode code) {
    using respire::ErrorCode;
    switch (code) {
        case ErrorCode::ok: return RESPIRE_OK;
        case ErrorCode::format: return RESPIRE_ERR_FORMAT;
        case ErrorCode::unsupported: return RESPIRE_ERR_UNSUPPORTED;
        case ErrorCode::empty_input: return RESPIRE_ERR_EMPTY_INPUT;
        case ErrorCode::all_silent: return RESPIRE_ERR_ALL_SILENT;
        case ErrorCode::parameter: return RESPIRE_ERR_PARAMETER;
        case ErrorCode::schema: return RESPIRE_ERR_SCHEMA;
        case ErrorCode::ingest: return RESPIRE_ERR_INGEST;
        case ErrorCode::pairing: return RESPIRE_ERR_PAIRING;
        case ErrorCode::fold: return RESPIRE_ERR_FOLD;
        case ErrorCode::metric: return RESPIRE_ERR_METRIC;
        case ErrorCode::degenerate_labels: return RESPIRE_ERR_DEGENERATE_LABELS;
        case ErrorCode::degenerate_variance: return RESPIRE_ERR_DEGENERATE_VARIANCE;
        case ErrorCode::io: return RESPIRE_ERR_IO;
        case ErrorCode::internal: return RESPIRE_ERR_INTERNAL;
    }
    return RESPIRE_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes + last-error message.
template <typename Fn>
respire_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return RESPIRE_OK;
    } catch (const respire::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return RESPIRE_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return RESPIRE_ERR_INTERNAL;
    }
}

respire_status invalid_arg(const char* what) {
    g_last_error = what;
    return RESPIRE_ERR_INVALID_ARG;
}

}  // namespace

struct respire_config {
    respire::RunConfig cfg;
};

extern "C" {

const char* respire_version(void) { return "1.0.0"; }

const char* respire_last_error(void) { return g_last_error.c_str(); }

respire_config* respire_config_create(void) { return new respire_config{}; }

void respire_config_free(respire_config* config) { delete config; }

respire_status respire_config_set(respire_config* config, const char* key,
                                  const char* value) {
    if (!config || !key || !value) {
        return invalid_arg("respire_config_set: null argument");
    }
    return guarded([&] { config->cfg.set(key, value); });
}

respire_status respire_config_get(const respire_config* config, const char* key,
                                  char* buffer, size_t buffer_size) {
    if (!config || !key || !buffer || buffer_size == 0) {
        return invalid_arg("respire_config_get: null argument");
    }
    return guarded([&] {
        const auto map = config->cfg.to_map();
        const auto it = map.find(key);
        if (it == map.end()) {
            throw respire::ParameterError(std::string("unknown config key '") + key +
                                          "'");
        }
        const std::size_t n = std::min(buffer_size - 1, it->second.size());
        std::memcpy(buffer, it->second.data(), n);
        buffer[n] = '\0';
    });
}

respire_status respire_config_load_file(respire_config* config, const char* path) {
    if (!config || !path) {
        return invalid_arg("respire_config_load_file: null argument");
    }
    return guarded([&] { config->cfg = respire::RunConfig::from_file(path); });
}

respire_status respire_synth(const respire_config* config, const char* out_dir,
                             int* n_participants_out) {
    if (!config || !out_dir) {
        return invalid_arg("respire_synth: null argument");
    }
    return guarded([&] {
        const respire::SynthResult r = respire::run_synth(config->cfg, out_dir);
        if (n_participants_out) {
            *n_participants_out = r.n_participants;
        }
    });
}

respire_status respire_extract(const respire_config* config,
                               const char* manifest_path, const char* out_dir,
                               int* n_extracted_out, int* n_skipped_out) {
    if (!config || !manifest_path || !out_dir) {
        return invalid_arg("respire_extract: null argument");
    }
    return guarded([&] {
        const respire::ExtractResult r =
            respire::run_extract(config->cfg, manifest_path, out_dir);
        if (n_extracted_out) {
            *n_extracted_out = r.n_extracted;
        }
        if (n_skipped_out) {
            *n_skipped_out = r.n_skipped;
        }
    });
}

respire_status respire_rank(const respire_config* config, const char* data_dir,
                            const char* out_dir) {
    if (!config || !data_dir || !out_dir) {
        return invalid_arg("respire_rank: null argument");
    }
    return guarded([&] { respire::run_rank(config->cfg, data_dir, out_dir); });
}

size_t respire_feature_vector_size(const respire_config* config) {
    if (!config) {
        return 0;
    }
    try {
        return respire::FeatureLayout::from_config(config->cfg).size();
    } catch (...) {
        return 0;
    }
}

respire_status respire_feature_vector_from_wav(const respire_config* config,
                                               const char* wav_path, double* out,
                                               size_t out_cap, size_t* out_len) {
    if (!config || !wav_path || !out) {
        return invalid_arg("respire_feature_vector_from_wav: null argument");
    }
    return guarded([&] {
        const respire::FeatureVector v = respire::build_feature_vector(
            respire::read_wav(wav_path), config->cfg);
        if (out_cap < v.values.size()) {
            throw respire::ParameterError(
                "output buffer holds " + std::to_string(out_cap) +
                " entries, need " + std::to_string(v.values.size()));
        }
        std::copy(v.values.begin(), v.values.end(), out);
        if (out_len) {
            *out_len = v.values.size();
        }
    });
}

}  // extern "C"
