/* C interface for the contracta library: channel loading, contraction
 * coefficient bounds, structure reports and Grothendieck reductions.
 *
 * All functions return ctr_status; on any status other than CTR_STATUS_OK a
 * thread-local message is available from ctr_last_error(). Strings returned
 * through char** are heap-allocated and must be released with
 * ctr_string_free(). Handles are created and destroyed in matching pairs and
 * are safe to use from multiple threads as long as each handle stays within
 * one thread at a time.
 */
#ifndef CONTRACTA_H
#define CONTRACTA_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ctr_channel ctr_channel;

typedef enum ctr_status {
  CTR_STATUS_OK = 0,
  CTR_ERROR_PARSE = 2,    /* malformed input document or parameters */
  CTR_ERROR_SOLVER = 3,   /* numerical failure inside a solver */
  CTR_ERROR_INVALID = 4,  /* contract violation (bad handle, bad dimensions) */
  CTR_ERROR_INTERNAL = 5
} ctr_status;

const char* ctr_version(void);
const char* ctr_last_error(void);
void ctr_string_free(char* s);

/* --- channels ---------------------------------------------------------- */

ctr_status ctr_channel_from_json(const char* json_text, ctr_channel** out);
ctr_status ctr_channel_from_file(const char* path, ctr_channel** out);
ctr_status ctr_channel_gallery(const char* name, const double* params,
                               int n_params, int copies, ctr_channel** out);
void ctr_channel_free(ctr_channel* ch);

int ctr_channel_dim_in(const ctr_channel* ch);
int ctr_channel_dim_out(const ctr_channel* ch);
int ctr_channel_kraus_count(const ctr_channel* ch);
ctr_status ctr_channel_to_json(const ctr_channel* ch, char** out_json);

/* Trace-preservation residual and the minimum Choi eigenvalue. */
ctr_status ctr_channel_validate(const ctr_channel* ch, double* tp_residual,
                                double* choi_min_eig);

/* --- bounds ------------------------------------------------------------ */

/* Doeblin coefficient; strict_choi_state switches the program to the
 * unit-trace Choi normalization. */
ctr_status ctr_doeblin(const ctr_channel* ch, int strict_choi_state,
                       double* alpha, double* eta_upper);

/* SDP hierarchy level m for k messages; eta_bound is filled for k = 2 and is
 * NaN otherwise. */
ctr_status ctr_hierarchy_bound(const ctr_channel* ch, int k, int m, int ppt,
                               double* psucc_bound, double* eta_bound);

ctr_status ctr_seesaw_eta(const ctr_channel* ch, int restarts, int max_iterations,
                          uint64_t seed, double* value);

ctr_status ctr_psucc_seesaw(const ctr_channel* ch, int k, int restarts,
                            int max_iterations, uint64_t seed, double* value);

/* Full bound report as JSON. opts_json may be NULL or an object with any of:
 *   {"k":2, "levels":[1,2], "ppt":false, "restarts":32, "seed":1,
 *    "strict_choi_state":false, "verify":false}
 */
ctr_status ctr_bound_report_json(const ctr_channel* ch, const char* opts_json,
                                 char** out_json);

/* --- structure --------------------------------------------------------- */

/* input_json is either a channel document or a subspace document
 * {"p":..,"q":..,"basis":[...]}; subspaces run through the operator-system
 * channel construction first. */
ctr_status ctr_eta_one_report_json(const char* input_json, int restarts,
                                   uint64_t seed, char** out_json);

/* --- reductions -------------------------------------------------------- */

/* instance_json: {"variant":"hermitian"|"commutative","operators":[...]}.
 * alpha <= 0 selects the default 0.9 * alpha_max. The output document holds
 * the channel JSON, alpha, alpha_max and the norm-identity report. */
ctr_status ctr_reduce_json(const char* instance_json, double alpha,
                           int with_bounds, char** out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CONTRACTA_H */
