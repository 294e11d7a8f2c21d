/* Public C interface to the cadaft core library.
 *
 * All functions return CADAFT_OK on success; on failure the return value
 * maps the error class (runtime vs. configuration) and a thread-local
 * message is available from cadaft_last_error(). Handles are opaque and
 * must be released with their matching *_free function. The library itself
 * is thread-compatible: distinct handles may be used from distinct threads,
 * one handle must not be shared without external synchronization.
 */
#ifndef CADAFT_H
#define CADAFT_H

#include <stddef.h>

#if defined(_WIN32)
#define CADAFT_API __declspec(dllexport)
#else
#define CADAFT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cadaft_status {
  CADAFT_OK = 0,
  CADAFT_ERR_RUNTIME = 1, /* I/O, contract or internal failures */
  CADAFT_ERR_CONFIG = 2   /* invalid configuration or arguments */
} cadaft_status;

typedef struct cadaft_config cadaft_config;

/* Library version string, e.g. "0.1.0". */
CADAFT_API const char* cadaft_version(void);

/* Message for the most recent failure on this thread ("" if none). */
CADAFT_API const char* cadaft_last_error(void);

/* Built-in defaults: the flipped-confounder numeric benchmark. */
CADAFT_API cadaft_status cadaft_config_default(cadaft_config** out_config);

/* Load a config file (JSON; line and block comments allowed). */
CADAFT_API cadaft_status cadaft_config_load(const char* path, cadaft_config** out_config);

/* Override one key by dotted path, e.g. ("train.lr", "0.01") or
 * ("data.kind", "textlike"). The value is parsed as JSON when possible,
 * otherwise taken as a string. */
CADAFT_API cadaft_status cadaft_config_set(cadaft_config* config, const char* dotted_key,
                                           const char* value);

/* Serialized effective config as a JSON string; caller must not free.
 * The pointer stays valid until the next call on the same handle. */
CADAFT_API const char* cadaft_config_json(cadaft_config* config);

CADAFT_API void cadaft_config_free(cadaft_config* config);

/* Write the benchmark splits described by the config, plus a manifest. */
CADAFT_API cadaft_status cadaft_generate(const cadaft_config* config, const char* out_dir);

/* Run the training schedule on datasets under data_dir; writes metrics.csv,
 * model.ckpt and manifest.json into out_dir. */
CADAFT_API cadaft_status cadaft_train(const cadaft_config* config, const char* data_dir,
                                      const char* out_dir);

/* Train the erm_only / no_confounder / full variants for every seed and
 * write ablation.csv plus per-run artifacts under out_dir. */
CADAFT_API cadaft_status cadaft_ablation(const cadaft_config* config, const unsigned long* seeds,
                                         size_t seed_count, const char* out_dir);

/* Annotate a sentence-pair file with the overlap confounder. alpha < 0
 * selects the default threshold 0.4; sweep_csv_path may be NULL to place
 * the sweep table next to the output. */
CADAFT_API cadaft_status cadaft_annotate(const char* input_path, const char* output_path,
                                         double alpha, const char* sweep_csv_path);

/* Overlap score of two whitespace-tokenized sentences: cross-pair equal-token
 * count (duplicates included) over the combined token count. Returns a
 * negative value and sets the error message if both sentences are empty. */
CADAFT_API double cadaft_overlap_score(const char* sentence_1, const char* sentence_2);

#ifdef __cplusplus
}
#endif

#endif /* CADAFT_H */
