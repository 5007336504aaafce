#ifndef ROCKETLITE_H
#define ROCKETLITE_H

/* C interface to the rocketlite time-series classification toolkit.
 *
 * All functions return rkl_status; on any failure rkl_last_error() holds a
 * human-readable message (thread-local). Objects returned through handle
 * out-parameters are owned by the caller and released with the matching
 * _free function. Strings returned through char** out-parameters are
 * released with rkl_string_free(). Structured reports are JSON text.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rkl_status {
    RKL_OK = 0,
    RKL_ERR_INVALID_ARGUMENT = 1,
    RKL_ERR_IO = 2,
    RKL_ERR_CORRUPT = 3,
    RKL_ERR_NUMERIC = 4,
    RKL_ERR_STATE = 5,
    RKL_ERR_UNSUPPORTED = 6,
    RKL_ERR_UNKNOWN = 7
} rkl_status;

typedef struct rkl_corpus rkl_corpus;  /* a set of labeled recordings */
typedef struct rkl_model rkl_model;    /* a model bundle (transform + classifier) */
typedef struct rkl_trace rkl_trace;    /* a device-simulation trace */

const char* rkl_version(void);
const char* rkl_last_error(void);
void rkl_string_free(char* s);

/* ---- corpus ----
 * config_text uses the TOML-like run-configuration syntax; generator options
 * live in its [gen] section. Pass "" for defaults. */
rkl_status rkl_corpus_generate(const char* config_text, uint64_t seed, rkl_corpus** out);
rkl_status rkl_corpus_load_dir(const char* dir, rkl_corpus** out);
rkl_status rkl_corpus_save_dir(const rkl_corpus* corpus, const char* dir);
rkl_status rkl_corpus_info_json(const rkl_corpus* corpus, char** out_json);
void rkl_corpus_free(rkl_corpus* corpus);

/* ---- training and models ---- */
rkl_status rkl_train(const rkl_corpus* corpus, const char* config_text,
                     rkl_model** out_model, char** out_report_json);
rkl_status rkl_model_save(const rkl_model* model, const char* path);
rkl_status rkl_model_load(const char* path, rkl_model** out);
rkl_status rkl_model_quantize(rkl_model* model, int32_t input_clamp_mg, int bit_width);
rkl_status rkl_model_info_json(const rkl_model* model, char** out_json);
rkl_status rkl_model_export_arrays(const rkl_model* model, char** out_source);
rkl_status rkl_model_memory_json(const rkl_model* model, char** out_json);

/* Classifies one window (channel-major samples, milli-g). use_quantized
 * selects the integer inference path and requires a quantized model. */
rkl_status rkl_model_predict(const rkl_model* model, const float* samples, int32_t channels,
                             int32_t length, int use_quantized, int32_t* out_class);
void rkl_model_free(rkl_model* model);

/* ---- evaluation ----
 * Windows the corpus with the configuration stored in the bundle (seed
 * overridable) and reports accuracy/F1 for the float path, plus the
 * quantized path and argmax agreement when the model is quantized. */
rkl_status rkl_eval(const rkl_model* model, const rkl_corpus* corpus, uint64_t seed,
                    char** out_json);

/* Golden vectors: emit `count` held-out windows with every inference stage
 * recorded, then replay them bit-exactly. */
rkl_status rkl_golden_emit(const rkl_model* model, const rkl_corpus* corpus, uint64_t seed,
                           int32_t count, const char* path);
rkl_status rkl_golden_replay(const rkl_model* model, const char* path, char** out_json);

/* Grid scan over sampling rates / feature counts; [scan] section of
 * config_text. Returns the results table as CSV text. */
rkl_status rkl_hyperscan(const rkl_corpus* corpus, const char* config_text, char** out_csv);

/* ---- device simulation ----
 * scenario_json: [{"t_start_s":..,"t_end_s":..,"activity":".."}, ...].
 * profile_json overrides individual energy-profile fields; NULL for
 * defaults. model may be NULL (wake cycles run without classification). */
rkl_status rkl_simulate(const char* scenario_json, const rkl_model* model,
                        const char* profile_json, double duration_s, uint64_t seed,
                        rkl_trace** out);
rkl_status rkl_trace_summary_json(const rkl_trace* trace, char** out_json);
rkl_status rkl_trace_export_csv(const rkl_trace* trace, const char* path);
void rkl_trace_free(rkl_trace* trace);

/* Battery life in years for a battery covering usage_hours of active
 * runtime; JSON report with the energy ledger. */
rkl_status rkl_battery_life(const char* profile_json, double capacity_mah, double usage_hours,
                            char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* ROCKETLITE_H */
