#include <stdio.h>
#include <string.h>
#include "nonclassicality.h"

int main(void) {
    const double q[] = {0.44, 0.07, 0.26, 0.30, 1.44, 3.60, 28.80};
    NcReport *report = NULL;
    if (nc_run_battery_q(q, 7, NULL, &report) != NC_STATUS_OK) return 10;
    if (nc_report_verdict(report) != NC_VERDICT_NONCLASSICAL) return 11;
    char *json = nc_report_to_json(report);
    if (json == NULL || strstr(json, "\"first_order\"") == NULL) return 12;
    nc_string_free(json);
    nc_report_free(report);

    NcDistribution *d = NULL;
    if (nc_thermal(1.0, 60, &d) != NC_STATUS_OK) return 13;
    NcConfig cfg = nc_config_default();
    if (nc_run_battery(d, &cfg, &report) != NC_STATUS_OK) return 14;
    if (nc_report_verdict(report) != NC_VERDICT_NO_VIOLATION_FOUND) return 15;
    nc_report_free(report);
    nc_distribution_free(d);

    const double bad[] = {0.5, 0.7};
    if (nc_distribution_new(bad, 2, NC_NORM_POLICY_EXACT, 1e-12, &d) != NC_STATUS_NORMALIZATION_VIOLATION) return 16;
    if (nc_last_error_message() == NULL) return 17;
    printf("ok %s\n", nc_version());
    return 0;
}
