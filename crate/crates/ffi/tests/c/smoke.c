#include <math.h>
#include <stdio.h>
#include <string.h>

#include "mti.h"

static int fail(const char *what, MtiStatus s) {
    fprintf(stderr, "%s: %s (%s)\n", what, mti_status_message(s), mti_last_error_message());
    return 1;
}

int main(void) {
    const uint32_t edges[] = {0, 1, 1, 2};
    MtiGraph *g = NULL;
    MtiStatus s = mti_graph_new(3, edges, 2, &g);
    if (s != MTI_STATUS_OK) return fail("graph_new", s);

    MtiLnIndex v;
    s = mti_ln_index(g, "pi2", MTI_POLICY_EXCLUDE, &v);
    if (s != MTI_STATUS_OK) return fail("ln_index", s);
    if (fabs(v.value - 2.0 * log(2.0)) > 1e-15 || v.is_log_zero) return 1;

    s = mti_ln_index(g, "bogus", MTI_POLICY_EXCLUDE, &v);
    if (s != MTI_STATUS_UNKNOWN_INDEX || strstr(mti_last_error_message(), "bogus") == NULL) return 1;
    mti_graph_free(g);

    MtiEnsembleStats st;
    s = mti_run_point(MTI_MODEL_ER, 50, 0, 0.2, "nk", 20, 1, 0, MTI_POLICY_EXCLUDE, 2, &st);
    if (s != MTI_STATUS_OK) return fail("run_point", s);
    printf("%llu %.17g\n", (unsigned long long)st.replicas, st.mean_ln);
    return 0;
}
