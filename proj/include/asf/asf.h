#ifndef ASF_ASF_H
#define ASF_ASF_H
/* C interface to the affine Springer fiber engine. Every call returns an
 * asf_status; on failure asf_last_error(session) describes it. Strings
 * returned through out-parameters are owned by the caller and released with
 * asf_free_string. A session is not safe for concurrent use; separate
 * sessions are independent. */

#ifdef __cplusplus
extern "C" {
#endif

#define ASF_VERSION "1.0.0"

#if defined(__GNUC__)
#define ASF_API __attribute__((visibility("default")))
#else
#define ASF_API
#endif

typedef struct asf_session asf_session;

typedef enum asf_status {
  ASF_OK = 0,
  ASF_E_INSUFFICIENT_PRECISION = 1,
  ASF_E_RANK_DEFICIENT = 2,
  ASF_E_DEGENERATE_FORM = 3,
  ASF_E_NOT_REGULAR_SEMISIMPLE = 4,
  ASF_E_UNSUPPORTED_CENTRALIZER = 5,
  ASF_E_NOT_STABILIZED = 6,
  ASF_E_POOR_FIT = 7,
  ASF_E_UNSUPPORTED_GROUP = 8,
  ASF_E_PARSE = 9,
  ASF_E_NOT_IN_LIE_ALGEBRA = 10,
  ASF_E_BAD_CHARACTERISTIC = 11,
  ASF_E_NOT_NILPOTENT = 12,
  ASF_E_NON_STANDARD_FORM = 13,
  ASF_E_REGION_NOT_MEASURABLE = 14,
  ASF_E_NOT_INVARIANT = 15,
  ASF_E_TRUNCATION_UNSTABLE = 16,
  ASF_E_SINGULAR_SYSTEM = 17,
  ASF_E_DEPTH_TOO_SMALL = 18,
  ASF_E_UNSUPPORTED_WEYL_GROUP = 19,
  ASF_E_UNSUPPORTED_COMPONENT_GROUP = 20,
  ASF_E_INVALID_ARGUMENT = 21,
  ASF_E_NULL_POINTER = 98,
  ASF_E_INTERNAL = 99
} asf_status;

ASF_API const char* asf_version(void);
/* symbolic name of a status, e.g. "NotStabilized" */
ASF_API const char* asf_status_name(int status);

ASF_API int asf_session_create(asf_session** out);
ASF_API void asf_session_destroy(asf_session* session);
/* message of the last failed call on this session; "" after a success */
ASF_API const char* asf_last_error(const asf_session* session);

/* Runs one command (count, dim, components, germs, nilint, steinberg, verify,
 * main) on a JSON config. *result receives the JSON envelope
 * {command, pass, summary, artifact, csv}; a run whose checks fail still
 * returns ASF_OK with "pass": false. */
ASF_API int asf_run(asf_session* session, const char* command, const char* config_json, char** result);
/* non-zero when the envelope in *result reported "pass": true */
ASF_API int asf_result_pass(const char* result);
/* cache key input for (command, config): sorted keys, worker count dropped */
ASF_API int asf_canonical_config(asf_session* session, const char* command, const char* config_json, char** out);
/* parses a Lie algebra element of group ("sl2", "sl3", "sp4") over F_q and
 * prints it back in canonical form */
ASF_API int asf_parse_element(asf_session* session, const char* group, const char* expr, int q, char** out);

ASF_API void asf_free_string(char* s);

#ifdef __cplusplus
}
#endif

#endif
