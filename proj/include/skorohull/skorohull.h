#ifndef SKOROHULL_SKOROHULL_H_
#define SKOROHULL_SKOROHULL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SH_API __declspec(dllexport)
#else
#define SH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sh_status {
  SH_OK = 0,
  SH_INVALID_ARGUMENT = 1,
  SH_DIMENSION_MISMATCH = 2,
  SH_NOT_CONVERGED = 3,
  SH_SINGULAR_MATRIX = 4,
  SH_CONTAINMENT = 5,
  SH_VALIDATION = 6,
  SH_IO = 7,
  SH_RUNTIME = 8,
} sh_status;

typedef struct sh_experiment sh_experiment;
typedef struct sh_report sh_report;

// Message of the last failing call on this thread; never NULL.
SH_API const char* sh_last_error(void);
SH_API const char* sh_version(void);

// Experiments. Every constructor writes a fresh handle to *out on success.
SH_API sh_status sh_experiment_load(const char* path, sh_experiment** out);
SH_API sh_status sh_experiment_parse(const char* text, sh_experiment** out);
// One of the default suite ("E1".."E4").
SH_API sh_status sh_experiment_default(const char* name, uint64_t seed, sh_experiment** out);
// Number of default experiments and the name of the i-th (static storage).
SH_API size_t sh_default_suite_size(void);
SH_API const char* sh_default_suite_name(size_t index);
SH_API sh_status sh_experiment_set(sh_experiment* exp, const char* key, const char* value);
SH_API sh_status sh_experiment_set_seed(sh_experiment* exp, uint64_t seed);
SH_API sh_status sh_experiment_set_check(sh_experiment* exp, int enabled);
SH_API sh_status sh_experiment_validate(const sh_experiment* exp);
// Canonical config text; the returned string is owned by the handle and
// lives until the next call on it.
SH_API const char* sh_experiment_name(const sh_experiment* exp);
SH_API const char* sh_experiment_format(sh_experiment* exp);
SH_API void sh_experiment_free(sh_experiment* exp);

// Reports.
SH_API sh_status sh_experiment_run(const sh_experiment* exp, sh_report** out);
SH_API size_t sh_report_row_count(const sh_report* report);
// Row accessor; scaled is NaN when the row has no scaled error.
SH_API sh_status sh_report_row(const sh_report* report, size_t index, size_t* copies,
                               int* replication, int* time_index, int* probe_index,
                               double* error, double* scaled, uint64_t* seed);
// Step-1 diagnostics; SH_VALIDATION when the report was run without them.
SH_API sh_status sh_report_step1(const sh_report* report, size_t* checks, size_t* violations);
// Smallest hitting frequency over all probes and time indices.
SH_API sh_status sh_report_min_hitting(const sh_report* report, double* frequency);
SH_API sh_status sh_report_write_csv(const sh_report* report, const char* path);
SH_API sh_status sh_report_write_json(const sh_report* report, const char* path);
SH_API void sh_report_free(sh_report* report);

// Geometry on a single body: kind is "interval", "box" or "ball". For
// intervals and boxes a holds the lower corner and b the upper one; for balls
// a is the centre and b[0] the radius.
SH_API sh_status sh_project(const char* kind, size_t dim, const double* a, const double* b,
                            const double* x, double* out);
SH_API sh_status sh_hull_distance(size_t dim, size_t count, const double* points,
                                  const double* x, double* distance);

#ifdef __cplusplus
}
#endif

#endif  // SKOROHULL_SKOROHULL_H_
