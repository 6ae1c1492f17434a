// Copyright 2026 The evaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef EVAUDIT_EVAUDIT_H_
#define EVAUDIT_EVAUDIT_H_

/* C interface to the evidence-audit toolkit.
 *
 * A session owns one run configuration. Every call returns a status; on
 * failure evaudit_last_error() and evaudit_last_error_name() describe it.
 * Text produced by a successful stage is available from evaudit_last_output()
 * and diagnostics from evaudit_last_warnings(), both valid until the next call
 * on the same session. A session must not be used from two threads at once. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EVAUDIT_API __declspec(dllexport)
#else
#define EVAUDIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct evaudit_session evaudit_session;

typedef enum evaudit_status {
  EVAUDIT_OK = 0,
  EVAUDIT_E_ARGUMENT = 1,   /* null pointer or malformed argument */
  EVAUDIT_E_CONFIG = 2,     /* configuration document rejected */
  EVAUDIT_E_INPUT = 3,      /* records, bundles or manifests */
  EVAUDIT_E_CHECKLIST = 4,  /* checklist parse/validation, inconsistent checklist */
  EVAUDIT_E_LOCK = 5,       /* lock missing, invalid or conflicting */
  EVAUDIT_E_LEDGER = 6,     /* invalid entry, unknown record, broken chain */
  EVAUDIT_E_AGGREGATE = 7,  /* missing label, empty cell */
  EVAUDIT_E_IO = 8,
  EVAUDIT_E_FAILED = 9,     /* stage ran and reported problems (validate) */
  EVAUDIT_E_INTERNAL = 10
} evaudit_status;

typedef enum evaudit_format { EVAUDIT_FORMAT_TEXT = 0, EVAUDIT_FORMAT_CSV = 1, EVAUDIT_FORMAT_JSON = 2 } evaudit_format;

EVAUDIT_API const char* evaudit_version(void);
EVAUDIT_API const char* evaudit_status_name(evaudit_status status);

/* `config_json` is the configuration document; relative paths in it resolve
 * against `base_dir` (NULL: current directory). `*out` is set even when the
 * configuration is rejected, so the error can be read; close it in both cases. */
EVAUDIT_API evaudit_status evaudit_session_open(const char* config_json, const char* base_dir, evaudit_session** out);
EVAUDIT_API void evaudit_session_close(evaudit_session* session);

EVAUDIT_API const char* evaudit_last_error(const evaudit_session* session);
EVAUDIT_API const char* evaudit_last_error_name(const evaudit_session* session);
EVAUDIT_API const char* evaudit_last_output(const evaudit_session* session);
/* Newline-separated. */
EVAUDIT_API const char* evaudit_last_warnings(const evaudit_session* session);

/* The effective configuration as JSON. */
EVAUDIT_API const char* evaudit_session_config(evaudit_session* session);

EVAUDIT_API evaudit_status evaudit_ingest(evaudit_session* session);
EVAUDIT_API evaudit_status evaudit_validate(evaudit_session* session);

/* `case_ref` is "<benchmark>/<case key>", or NULL to lock every draft.
 * `locked_at` NULL uses the current time. */
EVAUDIT_API evaudit_status evaudit_lock(evaudit_session* session, const char* case_ref, const char* const* reviewers,
                                        size_t reviewer_count, const char* locked_at);

EVAUDIT_API evaudit_status evaudit_score(evaudit_session* session);
EVAUDIT_API evaudit_status evaudit_adjudicate_apply(evaudit_session* session);
/* `entry_json` is a ledger entry without entry_id, prev_hash and hash. */
EVAUDIT_API evaudit_status evaudit_adjudicate_append(evaudit_session* session, const char* entry_json);
EVAUDIT_API evaudit_status evaudit_report(evaudit_session* session, evaudit_format format);
EVAUDIT_API evaudit_status evaudit_rank(evaudit_session* session, evaudit_format format);

/* Blocks serving the HTTP API until the process is interrupted. `token` NULL
 * or empty disables authentication. */
EVAUDIT_API evaudit_status evaudit_serve(evaudit_session* session, const char* host, int port, const char* token);

/* Parses a checklist predicate and returns its canonical text in `*out`
 * (free with evaudit_string_free). On a syntax error `*error_offset` receives
 * the byte offset. */
EVAUDIT_API evaudit_status evaudit_parse_predicate(evaudit_session* session, const char* text, char** out,
                                                   size_t* error_offset);
EVAUDIT_API void evaudit_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* EVAUDIT_EVAUDIT_H_ */
