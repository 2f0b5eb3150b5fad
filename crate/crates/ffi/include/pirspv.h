#ifndef PIRSPV_H
#define PIRSPV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PirspvStatus {
  PIRSPV_STATUS_OK = 0,
  PIRSPV_STATUS_NULL_POINTER = 1,
  PIRSPV_STATUS_INVALID_ARGUMENT = 2,
  PIRSPV_STATUS_INSUFFICIENT_SHARES = 3,
  PIRSPV_STATUS_DECODE_FAILURE = 4,
  PIRSPV_STATUS_PROTOCOL = 5,
  PIRSPV_STATUS_PARSE = 6,
  PIRSPV_STATUS_INTEGRITY = 7,
  PIRSPV_STATUS_NOT_FOUND = 8,
  PIRSPV_STATUS_IO = 9,
  PIRSPV_STATUS_BUFFER_TOO_SMALL = 10,
  PIRSPV_STATUS_INTERNAL = 11,
} PirspvStatus;

/**
 * A connected client session.
 */
typedef struct PirspvClient PirspvClient;

/**
 * A PIR database loaded into memory.
 */
typedef struct PirspvDatabase PirspvDatabase;

/**
 * A key to rectangle index for one database.
 */
typedef struct PirspvManifest PirspvManifest;

/**
 * Multi-server IT-PIR parameters.
 */
typedef struct PirspvParams PirspvParams;

/**
 * Outcome of a full lookup for one address.
 */
typedef struct PirspvSpvSummary {
  size_t entries;
  size_t verified;
  /**
   * Query plus response bytes over all rounds and servers.
   */
  uint64_t bandwidth;
} PirspvSpvSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pirspv_version(void);

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to fit). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `cap` writable bytes.
 */
size_t pirspv_last_error(char *buf, size_t cap);

/**
 * Load a `.pirdb` file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum PirspvStatus pirspv_db_open(const char *path, struct PirspvDatabase **out);

/**
 * Wrap a row-major payload as a database.
 *
 * # Safety
 * `payload` must point to `num_rows * row_width` readable bytes; `out` must be writable.
 */
enum PirspvStatus pirspv_db_from_rows(uint8_t kind,
                                      uint8_t period,
                                      size_t num_rows,
                                      size_t row_width,
                                      const uint8_t *payload,
                                      struct PirspvDatabase **out);

/**
 * # Safety
 * `db` must be a live handle or null.
 */
size_t pirspv_db_num_rows(const struct PirspvDatabase *db);

/**
 * # Safety
 * `db` must be a live handle or null.
 */
size_t pirspv_db_row_width(const struct PirspvDatabase *db);

/**
 * # Safety
 * `db` must come from this library and not be used afterwards.
 */
void pirspv_db_free(struct PirspvDatabase *db);

/**
 * Parse a manifest JSON document.
 *
 * # Safety
 * `json` must point to `len` readable bytes; `out` must be writable.
 */
enum PirspvStatus pirspv_manifest_parse(uint8_t kind,
                                        uint8_t period,
                                        const uint8_t *json,
                                        size_t len,
                                        struct PirspvManifest **out);

/**
 * Look up `key`; on success writes row_start, row_end, col_start, col_end
 * into `rect`. A missing key yields `PIRSPV_STATUS_NOT_FOUND`.
 *
 * # Safety
 * `m` must be a live handle, `key` NUL-terminated and `rect` point to 4 writable `size_t`s.
 */
enum PirspvStatus pirspv_manifest_lookup(const struct PirspvManifest *m,
                                         const char *key,
                                         size_t *rect);

/**
 * # Safety
 * `m` must be a live handle or null.
 */
size_t pirspv_manifest_len(const struct PirspvManifest *m);

/**
 * # Safety
 * `m` must come from this library and not be used afterwards.
 */
void pirspv_manifest_free(struct PirspvManifest *m);

/**
 * Parameters for `ell` servers at evaluation points 1..=ell, privacy `t`,
 * `k` expected responses and Byzantine budget `v`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PirspvStatus pirspv_params_new(size_t ell,
                                    size_t t,
                                    size_t k,
                                    size_t v,
                                    struct PirspvParams **out);

/**
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void pirspv_params_free(struct PirspvParams *p);

/**
 * Queries for `row` of a `num_rows`-row database. Server `s` gets bytes
 * `[s * num_rows, (s + 1) * num_rows)` of `out`, which must hold
 * `ell * num_rows` bytes.
 *
 * # Safety
 * `params` must be a live handle; `out` must point to `cap` writable bytes.
 */
enum PirspvStatus pirspv_itpir_gen_queries(const struct PirspvParams *params,
                                           size_t num_rows,
                                           size_t row,
                                           uint64_t seed,
                                           uint8_t *out,
                                           size_t cap);

/**
 * Server side: multiply one query into the database. `out` receives
 * `row_width` bytes.
 *
 * # Safety
 * `db` must be a live handle; `shares` must point to `len` bytes and
 * `out` to `cap` writable bytes.
 */
enum PirspvStatus pirspv_itpir_compute(const struct PirspvDatabase *db,
                                       const uint8_t *shares,
                                       size_t len,
                                       uint8_t *out,
                                       size_t cap);

/**
 * Reconstruct a row from `n` responses of `width` bytes each, stored back
 * to back in `responses`. `servers[i]` is the 0-based server index that
 * produced response `i`.
 *
 * # Safety
 * `params` must be a live handle; `servers` must hold `n` entries,
 * `responses` `n * width` bytes and `out` `cap` writable bytes.
 */
enum PirspvStatus pirspv_itpir_decode(const struct PirspvParams *params,
                                      const size_t *servers,
                                      const uint8_t *responses,
                                      size_t n,
                                      size_t width,
                                      uint8_t *out,
                                      size_t cap);

/**
 * Connect to a comma-separated server list. `backend` is 0 for IT-PIR,
 * 1 for C-PIR and 2 for whole-database download.
 *
 * # Safety
 * `servers` must be NUL-terminated; `out` must be writable.
 */
enum PirspvStatus pirspv_client_connect(const char *servers,
                                        uint8_t backend,
                                        size_t t,
                                        uint64_t seed,
                                        struct PirspvClient **out);

/**
 * Run the three-round lookup for a base58 address and summarise it.
 *
 * # Safety
 * `client` must be a live handle, `address` NUL-terminated and `out` writable.
 */
enum PirspvStatus pirspv_client_lookup(struct PirspvClient *client,
                                       const char *address,
                                       size_t min_confirmations,
                                       struct PirspvSpvSummary *out);

/**
 * # Safety
 * `client` must come from this library and not be used afterwards.
 */
void pirspv_client_free(struct PirspvClient *client);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PIRSPV_H */
