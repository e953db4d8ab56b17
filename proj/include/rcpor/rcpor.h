#ifndef RCPOR_RCPOR_H_
#define RCPOR_RCPOR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RCPOR_API __declspec(dllexport)
#else
#define RCPOR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rcpor_status {
  RCPOR_OK = 0,
  RCPOR_ERR_EMPTY_INPUT = 1,
  RCPOR_ERR_UNEQUAL_BLOCK_LENGTH,
  RCPOR_ERR_INDEX_OUT_OF_RANGE,
  RCPOR_ERR_BAD_RANDOMNESS_LENGTH,
  RCPOR_ERR_BAD_KEY_LENGTH,
  RCPOR_ERR_DECRYPT_FAILURE,
  RCPOR_ERR_EMPTY_FILE,
  RCPOR_ERR_PARAM_MISMATCH,
  RCPOR_ERR_INVALID_PARAMS,
  RCPOR_ERR_UNKNOWN_ADDRESS,
  RCPOR_ERR_INSUFFICIENT_BALANCE,
  RCPOR_ERR_OUT_OF_WINDOW,
  RCPOR_ERR_WRONG_SENDER,
  RCPOR_ERR_DUPLICATE_SLOT,
  RCPOR_ERR_NON_MONOTONIC_TIME,
  RCPOR_ERR_UNBALANCED,
  RCPOR_ERR_ALREADY_PAID,
  RCPOR_ERR_INVALID_SCHEDULE,
  RCPOR_ERR_UNKNOWN_CONTRACT,
  RCPOR_ERR_PRICE_NOT_IN_LIST,
  RCPOR_ERR_BAD_OPENING,
  RCPOR_ERR_REFUND_PATH,
  RCPOR_ERR_MISSING_QUERY,
  RCPOR_ERR_MALFORMED_STATEMENT,
  RCPOR_ERR_SPEC_INVALID,
  RCPOR_ERR_COUNTER_OUT_OF_BOUNDS,
  RCPOR_ERR_IO,
  RCPOR_ERR_NULL_ARGUMENT = 100,
  RCPOR_ERR_INTERNAL = 101
} rcpor_status;

RCPOR_API const char* rcpor_status_str(rcpor_status status);
// Message of the last failing call on this thread ("" if none).
RCPOR_API const char* rcpor_last_error(void);
RCPOR_API const char* rcpor_version(void);

/* Merkle trees. Blocks are block_len bytes each, concatenated. */
typedef struct rcpor_merkle rcpor_merkle;

RCPOR_API rcpor_status rcpor_merkle_build(const uint8_t* blocks, size_t block_count, size_t block_len,
                                          size_t hash_len, rcpor_merkle** out);
RCPOR_API void rcpor_merkle_free(rcpor_merkle* tree);
RCPOR_API size_t rcpor_merkle_height(const rcpor_merkle* tree);
// Writes hash_len bytes.
RCPOR_API rcpor_status rcpor_merkle_root(const rcpor_merkle* tree, uint8_t* out, size_t out_len);
// Serialized path for a 1-based index. Call with out = NULL to get the size.
RCPOR_API rcpor_status rcpor_merkle_prove(const rcpor_merkle* tree, uint32_t index, uint8_t* out,
                                          size_t* out_len);
// *valid is 1 iff the serialized path reproduces root.
RCPOR_API rcpor_status rcpor_merkle_verify(const uint8_t* path, size_t path_len, size_t block_len,
                                           const uint8_t* root, size_t hash_len, int* valid);

/* PRF index derivation: q_i = (PRF(key, i) mod m) + 1, i = 1..phi. */
RCPOR_API rcpor_status rcpor_derive_indices(const uint8_t* key, size_t key_len, uint32_t phi,
                                            uint32_t m, uint32_t* out);

/* Scenario runs. */
typedef struct rcpor_report rcpor_report;

typedef struct rcpor_run_options {
  int has_seed;
  uint64_t seed;
  const char* variant;  // NULL, "arbiter" or "arbiterless"
} rcpor_run_options;

RCPOR_API rcpor_status rcpor_scenario_run(const char* spec_json, const rcpor_run_options* options,
                                          rcpor_report** out);
RCPOR_API void rcpor_report_free(rcpor_report* report);
// Owned by the report.
RCPOR_API const char* rcpor_report_json(const rcpor_report* report);
RCPOR_API const char* rcpor_report_trace(const rcpor_report* report);
RCPOR_API int rcpor_report_valid(const rcpor_report* report);

// Re-checks a report; *valid is 1 iff it is VALID and internally consistent.
// problems (optional) receives a newline-separated list, owned by the
// library until the next call on this thread.
RCPOR_API rcpor_status rcpor_report_verify(const char* report_json, int* valid,
                                           const char** problems);

#ifdef __cplusplus
}
#endif

#endif  // RCPOR_RCPOR_H_
