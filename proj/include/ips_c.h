/* C interface to the potential-jump lab: configs, experiment drivers, and direct operator access. */
#ifndef IPS_C_H
#define IPS_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(IPS_BUILDING) && defined(__GNUC__)
#define IPS_API __attribute__((visibility("default")))
#else
#define IPS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* return codes; every function that can fail returns one of these */
enum {
    IPS_OK = 0,
    IPS_E_ARG = 1,
    IPS_E_CONFIG = 2,
    IPS_E_WELLPOSED = 3,
    IPS_E_NUMERIC = 4,
    IPS_E_IO = 5,
    IPS_E_INTERNAL = 6
};

typedef struct ips_config ips_config;
typedef struct ips_problem ips_problem; /* grid, sampled potential and solver for one config */

/* message of the last failing call on this thread; empty when none */
IPS_API const char* ips_last_error(void);
IPS_API const char* ips_version(void);

IPS_API int ips_config_load(const char* path, ips_config** out);
IPS_API int ips_config_parse(const char* json_text, ips_config** out);
/* "32" or "32x32x48" */
IPS_API int ips_config_set_grid(ips_config* c, const char* spec);
IPS_API int ips_config_set_seed(ips_config* c, uint64_t seed);
IPS_API int ips_config_hash(const ips_config* c, uint64_t* out);
/* the string stays valid until the config is changed or freed */
IPS_API int ips_config_out_dir(const ips_config* c, const char** out);
IPS_API void ips_config_free(ips_config* c);

/* experiment drivers; outputs go to out_dir, or the configured directory when out_dir is NULL */
IPS_API int ips_run_forward(const ips_config* c, int threads, const char* out_dir);
IPS_API int ips_run_needle(const ips_config* c, int threads, const char* out_dir);
IPS_API int ips_run_scan(const ips_config* c, int threads, const char* out_dir);
IPS_API int ips_run_classify(const ips_config* c, int threads, const char* out_dir);
IPS_API int ips_run_rates(const ips_config* c, int threads, const char* out_dir);
/* gathers summary.txt from out_dir and its subdirectories into out_dir/report.txt;
   counts of PASS and FAIL lines are returned through the optional pointers */
IPS_API int ips_report(const char* out_dir, int* passed, int* failed);

/* fails with IPS_E_WELLPOSED when the Dirichlet problem is near singular */
IPS_API int ips_problem_create(const ips_config* c, ips_problem** out);
IPS_API void ips_problem_free(ips_problem* p);
IPS_API int ips_problem_lambda_min(const ips_problem* p, double* out);
IPS_API int ips_problem_boundary_size(const ips_problem* p, size_t* out);
/* boundary node coordinates, 3 * boundary_size doubles */
IPS_API int ips_problem_boundary_nodes(const ips_problem* p, double* xyz);
/* <Lambda_V f, g> and <(Lambda_V - Lambda_0) f, g> for boundary data of boundary_size entries */
IPS_API int ips_problem_dtn_pairing(const ips_problem* p, const double* f, const double* g, double* out);
IPS_API int ips_problem_dtn_difference(const ips_problem* p, const double* f, const double* g, double* out);
/* method: probe, ssm, cim, i1, ips, ips_function or weak. x is moved to the nearest cell center;
   the point used is written to x_used when it is not NULL */
IPS_API int ips_problem_indicator(const ips_problem* p, const char* method, const double x[3], double* value,
                          double x_used[3]);

#ifdef __cplusplus
}
#endif

#endif
