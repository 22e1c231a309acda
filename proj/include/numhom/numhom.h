#ifndef NUMHOM_H
#define NUMHOM_H

#include <stddef.h>
#include <stdint.h>

#if defined(NUMHOM_BUILDING_LIBRARY)
#define NH_API __attribute__((visibility("default")))
#else
#define NH_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nh_status {
  NH_OK = 0,
  NH_INVALID_ARGUMENT = 1,
  NH_SOLVER_FAILURE = 2,
  NH_IO_ERROR = 3,
  NH_INTERNAL_ERROR = 4
} nh_status;

/* A basis keeps a pointer to its mesh: destroy the mesh last. */
typedef struct nh_mesh nh_mesh;
typedef struct nh_field nh_field;
typedef struct nh_basis nh_basis;

NH_API const char* nh_version(void);
/* Message of the last failed call on this thread ("" if none). */
NH_API const char* nh_last_error(void);
NH_API const char* nh_status_name(nh_status status);
NH_API void nh_string_free(char* s);

NH_API nh_status nh_mesh_create(int cells_per_axis, nh_mesh** out);
NH_API void nh_mesh_destroy(nh_mesh* mesh);
NH_API nh_status nh_mesh_info(const nh_mesh* mesh, size_t* nodes, size_t* triangles, size_t* dofs);

/* spec_json describes the medium, e.g. {"kind":"percolation","gamma":4}. */
NH_API nh_status nh_field_generate(const nh_mesh* mesh, const char* spec_json, uint64_t seed, nh_field** out);
/* format is "binary" or "csv"; *data_path (optional) receives the data file path. */
NH_API nh_status nh_field_save(const nh_field* field, const char* base, const char* format, char** data_path);
NH_API nh_status nh_field_load(const char* path, nh_field** out);
NH_API void nh_field_destroy(nh_field* field);
NH_API nh_status nh_field_info(const nh_field* field, int* cells_per_axis, double* lambda_min, double* lambda_max,
                               double* median, uint64_t* hash);
NH_API nh_status nh_field_values(const nh_field* field, const double** values, size_t* count);

/* recipe_json may be NULL for the defaults. */
NH_API nh_status nh_basis_build(const nh_mesh* mesh, const nh_field* field, double h, const char* recipe_json,
                                nh_basis** out);
NH_API nh_status nh_basis_save(const nh_basis* basis, const char* dir);
NH_API nh_status nh_basis_load(const nh_mesh* mesh, const char* dir, nh_basis** out);
NH_API void nh_basis_destroy(nh_basis* basis);
NH_API nh_status nh_basis_size(const nh_basis* basis, size_t* count);
/* Fine interior values of psi_i; dofs must hold the mesh dof count. */
NH_API nh_status nh_basis_function(const nh_basis* basis, size_t i, double* dofs, size_t len);

/* Elliptic solve with source "sin", "one" or "zero" in the span of basis, or
   on the fine mesh when basis is NULL. Writes the fine interior values. */
NH_API nh_status nh_solve_elliptic(const nh_mesh* mesh, const nh_field* field, const nh_basis* basis,
                                   const char* source, double* dofs, size_t len);
/* Relative L2, H1-seminorm and max-norm errors of candidate against reference. */
NH_API nh_status nh_error_report(const nh_mesh* mesh, const double* reference, const double* candidate, size_t len,
                                 double errors[3]);

/* study: "convergence", "sweep", "channel", "wave" or "solve". config_json
   overrides the study defaults and may be NULL. format is "json" or "csv".
   *result receives a string to release with nh_string_free. */
NH_API nh_status nh_study_run(const char* study, const char* config_json, const char* format, char** result);
/* The study defaults merged with config_json, as JSON. */
NH_API nh_status nh_study_config(const char* study, const char* config_json, char** result);

#ifdef __cplusplus
}
#endif

#endif
