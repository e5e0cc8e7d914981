/* respire — respiratory-audio feature extraction and model ranking.
 *
 * C API over the C++ core. All functions return a respire_status; on
 * failure respire_last_error() carries a human-readable message for the
 * calling thread. Handles are opaque and must be released with their
 * matching *_free function.
 */

#ifndef RESPIRE_H
#define RESPIRE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum respire_status {
    RESPIRE_OK = 0,
    RESPIRE_ERR_FORMAT = 1,
    RESPIRE_ERR_UNSUPPORTED = 2,
    RESPIRE_ERR_EMPTY_INPUT = 3,
    RESPIRE_ERR_ALL_SILENT = 4,
    RESPIRE_ERR_PARAMETER = 5,
    RESPIRE_ERR_SCHEMA = 6,
    RESPIRE_ERR_INGEST = 7,
    RESPIRE_ERR_PAIRING = 8,
    RESPIRE_ERR_FOLD = 9,
    RESPIRE_ERR_METRIC = 10,
    RESPIRE_ERR_DEGENERATE_LABELS = 11,
    RESPIRE_ERR_DEGENERATE_VARIANCE = 12,
    RESPIRE_ERR_IO = 13,
    RESPIRE_ERR_INVALID_ARG = 14,
    RESPIRE_ERR_INTERNAL = 15
} respire_status;

typedef struct respire_config respire_config;

const char* respire_version(void);

/* Message of the last failure on this thread; empty string when none. */
const char* respire_last_error(void);

/* Configuration: flat key=value pairs mirroring the config file format. */
respire_config* respire_config_create(void);
void respire_config_free(respire_config* config);
respire_status respire_config_set(respire_config* config, const char* key,
                                  const char* value);
respire_status respire_config_get(const respire_config* config, const char* key,
                                  char* buffer, size_t buffer_size);
respire_status respire_config_load_file(respire_config* config, const char* path);

/* Writes a synthetic labeled corpus (WAV files + manifest.csv) under
 * out_dir; *n_participants_out (optional) receives the participant count. */
respire_status respire_synth(const respire_config* config, const char* out_dir,
                             int* n_participants_out);

/* Extracts dataset_b.csv / dataset_c.csv / dataset_bc.csv from a manifest.
 * n_extracted_out / n_skipped_out are optional. */
respire_status respire_extract(const respire_config* config,
                               const char* manifest_path, const char* out_dir,
                               int* n_extracted_out, int* n_skipped_out);

/* Runs the models x subsets x sample-types evaluation grid over the dataset
 * CSVs in data_dir and writes report.json, table.txt, curve CSVs and
 * optional SVG panels under out_dir. */
respire_status respire_rank(const respire_config* config, const char* data_dir,
                            const char* out_dir);

/* Number of entries in a per-recording feature vector for this config. */
size_t respire_feature_vector_size(const respire_config* config);

/* Decodes one WAV file and fills out[0..size) with its feature vector.
 * out_cap must be at least respire_feature_vector_size(). */
respire_status respire_feature_vector_from_wav(const respire_config* config,
                                               const char* wav_path, double* out,
                                               size_t out_cap, size_t* out_len);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RESPIRE_H */
