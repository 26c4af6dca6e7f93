#include <stdio.h>
#include <stdlib.h>
#include "osserman_lab.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s\n", #cond); return 1; } } while (0)

int main(void) {
    CHECK(ol_radon_bound(16) == 8);

    double eta[3] = {1.0, 1.0, 1.0};
    OlCliffordSystem *sys = NULL;
    CHECK(ol_clifford_generate(8, 3, 1.0, eta, 3, 5, true, &sys) == OL_STATUS_OK);
    CHECK(ol_clifford_dim(sys) == 8);

    OlCurvTensor *t = NULL;
    CHECK(ol_tensor_from_clifford(sys, &t) == OL_STATUS_OK);
    OlOssermanSummary s;
    CHECK(ol_tensor_osserman(t, sys, 40, 1, &s) == OL_STATUS_OK);
    CHECK(s.is_osserman);

    OlCliffordSystem *bad = NULL;
    CHECK(ol_clifford_generate(6, 2, 1.0, eta, 2, 0, false, &bad) == OL_STATUS_UNSUPPORTED);
    char *msg = ol_last_error_message();
    CHECK(msg != NULL);
    ol_string_free(msg);

    ol_tensor_free(t);
    ol_clifford_free(sys);
    printf("ok\n");
    return 0;
}
