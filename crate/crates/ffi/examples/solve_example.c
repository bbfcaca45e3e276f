/* Solves the first built-in example and a scalar callback problem. */
#include <math.h>
#include <stdio.h>

#include "pdae.h"

static void one(double x, double t, double *out, void *ud) {
    (void)x; (void)t; (void)ud;
    out[0] = 1.0;
}

static void zero(double x, double t, double *out, void *ud) {
    (void)x; (void)t; (void)ud;
    out[0] = 0.0;
}

static void rhs(double x, double t, double *out, void *ud) {
    (void)x; (void)t; (void)ud;
    out[0] = 2.0;
}

static void exact(double x, double t, double *out, void *ud) {
    (void)ud;
    out[0] = x + t;
}

static void boundary(double s, double *out, void *ud) {
    (void)ud;
    out[0] = s;
}

static int check(PdaeStatus st, const char *what) {
    if (st != PDAE_STATUS_OK) {
        const char *msg = pdae_last_error_message();
        fprintf(stderr, "%s failed: %s (%s)\n", what, pdae_status_name(st), msg ? msg : "");
        return 1;
    }
    return 0;
}

int main(void) {
    PdaeProblem *p = NULL;
    PdaeSolution *s = NULL;
    double du = 0.0;
    if (check(pdae_problem_new_example("1", &p), "example")) return 1;
    if (check(pdae_solve(p, 0, 1, 0, 1, 0.1, 0.1, 2, 2, PDAE_STRIDE_UNIT, &s), "solve")) return 1;
    if (check(pdae_solution_delta_u(s, &du), "delta_u")) return 1;
    printf("example1 delta_u %.6e cells %zu\n", du, pdae_solution_cells(s));
    pdae_solution_free(s);
    pdae_problem_free(p);

    if (check(pdae_problem_new_callbacks(1, one, one, zero, rhs, boundary, boundary, exact, NULL, &p),
              "callbacks"))
        return 1;
    if (check(pdae_solve(p, 0, 1, 0, 1, 0.25, 0.25, 1, 1, PDAE_STRIDE_UNIT, &s), "solve")) return 1;
    if (check(pdae_solution_delta_u(s, &du), "delta_u")) return 1;
    printf("linear delta_u %.3e\n", du);
    pdae_solution_free(s);
    pdae_problem_free(p);

    if (pdae_problem_new_example("nope", &p) != PDAE_STATUS_INVALID_ARGUMENT) return 1;
    return fabs(du) < 1e-12 ? 0 : 1;
}
