#include <math.h>
#include <stdio.h>

#include "impulse_cd.h"

int main(void) {
    IcdModel *model = NULL;
    if (icd_model_new_lz(1.0, -10.0, 5.0, &model) != ICD_STATUS_OK) {
        return 1;
    }
    IcdRunOptions opts = icd_run_options_default();
    opts.samples = 11;
    IcdRun *run = NULL;
    if (icd_run(model, &opts, &run) != ICD_STATUS_OK) {
        fprintf(stderr, "%s\n", icd_last_error());
        return 2;
    }
    IcdCosts costs;
    icd_run_costs(run, &costs);
    printf("%.6f %.6f %zu\n", icd_run_final_fidelity(run), costs.ratio, (size_t)icd_run_trace_len(run));

    IcdModel *bad = NULL;
    int status = icd_model_new_tfim_momentum(5, 1.0, 0.0, 1.0, &bad);
    printf("%d %s\n", status, icd_last_error() ? "err" : "none");

    icd_run_free(run);
    icd_model_free(model);
    return 0;
}
