/* SPDX-License-Identifier: Apache-2.0 */
/* Copyright (C) 2026 spss-synth contributors */

#ifndef SPSS_H
#define SPSS_H

#include <stdint.h>

#if defined(_WIN32)
#  define SPSS_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define SPSS_API __attribute__((visibility("default")))
#else
#  define SPSS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum spss_status {
    SPSS_OK = 0,
    SPSS_ERR_INTERNAL = 1,
    SPSS_ERR_CONFIG = 2,
    SPSS_ERR_TRAINING = 3,
    SPSS_ERR_MISMATCH = 4,
    SPSS_ERR_DATA = 5
} spss_status;

typedef struct spss_scenario spss_scenario;
typedef struct spss_model spss_model;

/* Figures of merit of the achieved (or evaluated) pattern. */
typedef struct spss_summary {
    int pencil;               /* 1 pencil, 0 shaped */
    double xi_db;             /* xi_pen or xi_sha */
    double peak_theta_deg;
    double peak_phi_deg;
    double peak_error_deg;    /* pencil only */
    double footprint_x;       /* footprint peak, m */
    double footprint_y;
    double footprint_error_m; /* pencil only; NaN when the target misses the ground */
    int ipt_iterations;       /* synthesize / footprint of reference currents */
    double gamma_final;
    double delta_final;       /* synthesize */
    int config_hash_match;    /* evaluate: 1 match, 0 differ, -1 no manifest next to the layout */
} spss_summary;

/* Surrogate fit statistics. */
typedef struct spss_train_summary {
    int records;             /* distinct training inputs */
    int duplicates;          /* merged duplicate inputs */
    double max_interp_error; /* relative, at the training inputs */
    double c_min;            /* tuned correlation parameters */
    double c_max;
    double max_nugget;
} spss_train_summary;

SPSS_API const char* spss_version(void);

/* Message of the last failure on the calling thread. */
SPSS_API const char* spss_last_error(void);

SPSS_API spss_status spss_scenario_load(const char* config_path, spss_scenario** out);
SPSS_API spss_status spss_scenario_override_seeds(spss_scenario* scn, uint64_t seed);
/* FNV-1a of the normalised config; owned by the scenario. */
SPSS_API const char* spss_scenario_hash(const spss_scenario* scn);
SPSS_API void spss_scenario_free(spss_scenario* scn);

/* Builds the training set, fits the surrogate and writes it under out_dir.
   `model` and `summary` may be NULL. */
SPSS_API spss_status spss_train(const spss_scenario* scn, const char* out_dir, spss_model** model,
                                spss_train_summary* summary);

/* Loads the twin named by the scenario. model_path may be NULL for the
   oracle twin. */
SPSS_API spss_status spss_model_load(const spss_scenario* scn, const char* model_path, spss_model** out);
SPSS_API void spss_model_free(spss_model* model);

SPSS_API spss_status spss_synthesize(const spss_scenario* scn, const spss_model* model, const char* out_dir,
                                     spss_summary* summary);
SPSS_API spss_status spss_evaluate(const spss_scenario* scn, const spss_model* model, const char* layout_csv,
                                   const char* out_dir, spss_summary* summary);
/* Footprint of a saved layout, or of the reference currents when
   layout_csv is NULL (model may then be NULL too). */
SPSS_API spss_status spss_footprint(const spss_scenario* scn, const spss_model* model, const char* layout_csv,
                                    const char* out_dir, spss_summary* summary);
/* Checks a synthesis directory against its manifest and writes index.json
   into out_dir (or into dir when out_dir is NULL). */
SPSS_API spss_status spss_report(const char* dir, const char* out_dir, spss_summary* summary);

SPSS_API spss_status spss_set_threads(int threads);

/* Ground hit of the ray leaving the skin centre along (theta, phi). */
SPSS_API spss_status spss_footprint_point(double theta_deg, double phi_deg, double height, double* x, double* y);

#ifdef __cplusplus
}
#endif

#endif
