/* SPDX-License-Identifier: Apache-2.0 */

#ifndef FOGPHR_H
#define FOGPHR_H

/* Generated with cbindgen:0.27.0 */

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FogphrStatus {
  FOGPHR_STATUS_OK = 0,
  FOGPHR_STATUS_NULL_ARGUMENT = 1,
  FOGPHR_STATUS_INVALID_ARGUMENT = 2,
  FOGPHR_STATUS_MALFORMED = 3,
  FOGPHR_STATUS_SIGNATURE_INVALID = 4,
  FOGPHR_STATUS_KEY_EXPIRED = 5,
  FOGPHR_STATUS_POLICY_UNSATISFIED = 6,
  FOGPHR_STATUS_ENVELOPE_AUTH_FAILED = 7,
  FOGPHR_STATUS_KEY_BINDING_INVALID = 8,
  FOGPHR_STATUS_PAYLOAD_TOO_LARGE = 9,
  FOGPHR_STATUS_INTERNAL = 10,
  FOGPHR_STATUS_PANIC = 11,
} FogphrStatus;

typedef struct FogphrAttributeKey FogphrAttributeKey;

typedef struct FogphrMasterKey FogphrMasterKey;

typedef struct FogphrPublicParams FogphrPublicParams;

typedef struct FogphrRecord FogphrRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Empty after a
 * success. Valid until the next call on the same thread.
 */
const char *fogphr_last_error_message(void);

/**
 * Releases a buffer returned by this library.
 */
void fogphr_bytes_free(uint8_t *ptr, size_t len);

enum FogphrStatus fogphr_setup(uint32_t security_bits,
                               struct FogphrPublicParams **out_pk,
                               struct FogphrMasterKey **out_mk);

/**
 * `attributes`: comma-separated names. `validity`: days or ranges such as
 * `2020-06-20..2020-06-22,2020-07-01`.
 */
enum FogphrStatus fogphr_keygen(const struct FogphrPublicParams *pk,
                                const struct FogphrMasterKey *mk,
                                const char *attributes,
                                const char *validity,
                                struct FogphrAttributeKey **out_key);

enum FogphrStatus fogphr_encrypt(const struct FogphrPublicParams *pk,
                                 const char *policy,
                                 const uint8_t *payload,
                                 size_t payload_len,
                                 struct FogphrRecord **out_record);

/**
 * `now` is a `YYYY-MM-DD` date. The plaintext is returned in a buffer to
 * be released with [`fogphr_bytes_free`].
 */
enum FogphrStatus fogphr_decrypt(const struct FogphrPublicParams *pk,
                                 const struct FogphrAttributeKey *key,
                                 const struct FogphrRecord *record,
                                 const char *now,
                                 uint8_t **out_ptr,
                                 size_t *out_len);

enum FogphrStatus fogphr_public_params_serialize(const struct FogphrPublicParams *obj,
                                                 uint8_t **out_ptr,
                                                 size_t *out_len);

enum FogphrStatus fogphr_public_params_deserialize(const uint8_t *data,
                                                   size_t len,
                                                   struct FogphrPublicParams **out);

void fogphr_public_params_free(struct FogphrPublicParams *obj);

enum FogphrStatus fogphr_master_key_serialize(const struct FogphrMasterKey *obj,
                                              uint8_t **out_ptr,
                                              size_t *out_len);

enum FogphrStatus fogphr_master_key_deserialize(const uint8_t *data,
                                                size_t len,
                                                struct FogphrMasterKey **out);

void fogphr_master_key_free(struct FogphrMasterKey *obj);

enum FogphrStatus fogphr_attribute_key_serialize(const struct FogphrAttributeKey *obj,
                                                 uint8_t **out_ptr,
                                                 size_t *out_len);

enum FogphrStatus fogphr_attribute_key_deserialize(const uint8_t *data,
                                                   size_t len,
                                                   struct FogphrAttributeKey **out);

void fogphr_attribute_key_free(struct FogphrAttributeKey *obj);

enum FogphrStatus fogphr_record_serialize(const struct FogphrRecord *obj,
                                          uint8_t **out_ptr,
                                          size_t *out_len);

enum FogphrStatus fogphr_record_deserialize(const uint8_t *data,
                                            size_t len,
                                            struct FogphrRecord **out);

void fogphr_record_free(struct FogphrRecord *obj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOGPHR_H */
