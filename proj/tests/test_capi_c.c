/* Pure C consumer: the header must compile as C99 and the ABI must hold. */
#include <math.h>
#include <stdio.h>

#include "vfgl.h"

int main(void) {
    vfgl_toolkit* tk = NULL;
    if (vfgl_toolkit_create(8.0, 8001, -3.0, 3.0, &tk) != VFGL_OK) {
        fprintf(stderr, "create failed: %s\n", vfgl_last_error());
        return 1;
    }
    double l1 = 0.0, l2 = 0.0;
    if (vfgl_lambda(tk, 0.0, &l1, &l2) != VFGL_OK) {
        fprintf(stderr, "lambda failed: %s\n", vfgl_last_error());
        vfgl_toolkit_free(tk);
        return 1;
    }
    if (!(l1 > 0.5 && l1 < 0.7 && l2 > l1)) {
        fprintf(stderr, "unexpected eigenvalues %f %f\n", l1, l2);
        vfgl_toolkit_free(tk);
        return 1;
    }
    if (vfgl_lambda(tk, 99.0, &l1, NULL) == VFGL_OK) {
        fprintf(stderr, "expected a range error\n");
        vfgl_toolkit_free(tk);
        return 1;
    }
    vfgl_toolkit_free(tk);
    printf("c-api ok (lambda(0) = %.6f)\n", l1);
    return 0;
}
