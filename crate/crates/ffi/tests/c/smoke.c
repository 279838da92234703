#include <math.h>
#include <stdio.h>
#include "symsep.h"

int main(void) {
    double t = 0.0;
    if (symsep_ppt_threshold(SYMSEP_FAMILY_BREUER, 6, 0, 0.0, 1.0, &t) != SYMSEP_STATUS_OK) return 1;
    if (fabs(t - 0.125) > 1e-8) return 2;

    SymsepSymmetric *be5 = NULL;
    if (symsep_bound_entangled(5, &be5) != SYMSEP_STATUS_OK) return 3;
    double m14 = 0.0, m23 = 0.0;
    symsep_split_pt_min(be5, 1, 4, &m14);
    symsep_split_pt_min(be5, 2, 3, &m23);
    symsep_symmetric_free(be5);
    if (m14 < -1e-10 || m23 < -1e-10) return 4;

    SymsepDensity *rho = NULL;
    if (symsep_breuer(3, 0.1, &rho) != SYMSEP_STATUS_INVALID_ARGUMENT) return 5;
    if (symsep_last_error() == NULL) return 6;

    printf("ok %s\n", symsep_version());
    return 0;
}
