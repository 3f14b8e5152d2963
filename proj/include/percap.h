#ifndef PERCAP_H
#define PERCAP_H

/* C interface to the percap experiment engine. Handles are opaque; every
 * call returns a status code, and per-handle error text is available through
 * percap_run_error(). Strings returned by accessor functions stay owned by
 * the handle; strings returned through out-parameters are released with
 * percap_free(). */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum percap_status {
  PERCAP_OK = 0,
  PERCAP_ERR_CONFIG = 1,       /* invalid configuration (CLI exit code 2) */
  PERCAP_ERR_UNDERPOWERED = 2, /* underpowered run / bracket failure (CLI exit code 3) */
  PERCAP_ERR_IO = 3,
  PERCAP_ERR_INVALID = 4, /* null handle or bad argument */
  PERCAP_ERR_INTERNAL = 5
} percap_status;

typedef struct percap_run percap_run;

const char* percap_version(void);

/* Creates a run handle from a JSON experiment configuration. */
percap_status percap_run_create(const char* config_json, percap_run** out);
percap_status percap_run_create_from_file(const char* path, percap_run** out);
void percap_run_destroy(percap_run* run);

/* Optional overrides, applied before execution. */
percap_status percap_run_override_seed(percap_run* run, uint64_t seed);
percap_status percap_run_override_workers(percap_run* run, int32_t workers);
percap_status percap_run_override_output_dir(percap_run* run, const char* dir);
/* Turns the run into a parameter sweep; may be called once or twice. */
percap_status percap_run_add_grid(percap_run* run, const char* grid_spec);

percap_status percap_run_execute(percap_run* run);

/* Valid after a successful execute; owned by the handle. */
const char* percap_run_result_csv(const percap_run* run);
const char* percap_run_result_json(const percap_run* run);
/* Paths of the files written when an output directory was set ("" if none). */
const char* percap_run_csv_path(const percap_run* run);
const char* percap_run_json_path(const percap_run* run);

/* Last error message for this handle ("" if none). */
const char* percap_run_error(const percap_run* run);

/* Exhaustive 2^E enumeration of a small region (E <= 24): exact connection
 * probability, expected cluster size, pioneer distribution. *result_json is
 * allocated; release with percap_free(). */
percap_status percap_oracle_enumerate(const char* request_json, char** result_json);

void percap_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PERCAP_H */
