/* C interface to the hgp library: box families of residually amenable
 * groups, fibred coarse-embedding certificates with verifiers, and the
 * cocycle <-> negative-type-function pipelines, all over exact rationals.
 *
 * Usage: create a session from config text, run one command, read the JSON
 * report and CSV artifacts, destroy the session. Sessions are not
 * thread-safe; use one per thread.
 */
#ifndef HGP_H
#define HGP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct hgp_session hgp_session;

typedef enum hgp_status {
  HGP_OK = 0,
  HGP_CONFIG_ERROR = 1,       /* bad config text or unknown catalog entry */
  HGP_SCOPE_ERROR = 2,        /* request outside a certified scope */
  HGP_RESOURCE_ERROR = 3,     /* a configured cap would be exceeded */
  HGP_PRECONDITION_ERROR = 4, /* operation preconditions violated */
  HGP_STRUCTURE_ERROR = 5,    /* internal consistency assertion failed */
  HGP_INTERNAL_ERROR = 6,     /* unexpected failure */
  HGP_INVALID_ARGUMENT = 7    /* null handle or bad argument */
} hgp_status;

/* Parses key = value config text. On success *out owns a new session. */
hgp_status hgp_session_create(const char* config_text, hgp_session** out);
void hgp_session_destroy(hgp_session* s);

/* command: "boxfam" | "forward" | "backward" | "verify-cert" | "pullback".
 * Returns HGP_OK when the run completed (the report may still record a
 * failing summary); error statuses mean no report was produced. */
hgp_status hgp_run(hgp_session* s, const char* command);

/* Valid until the next hgp_run or destroy. NULL before the first run. */
const char* hgp_report_json(const hgp_session* s);

int hgp_artifact_count(const hgp_session* s);
const char* hgp_artifact_name(const hgp_session* s, int index);
const char* hgp_artifact_data(const hgp_session* s, int index);

/* 1 if the last run's summary passed, 0 if it failed, -1 before any run. */
int hgp_summary_pass(const hgp_session* s);

/* Message of the last failed call on this session ("" if none). */
const char* hgp_last_error(const hgp_session* s);

const char* hgp_version(void);

#ifdef __cplusplus
}
#endif

#endif /* HGP_H */
