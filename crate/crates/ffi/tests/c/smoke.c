#include <math.h>
#include <stdio.h>
#include <string.h>

#include "rid_rvo.h"

#define CHECK(cond)                                                     \
    do {                                                                \
        if (!(cond)) {                                                  \
            fprintf(stderr, "check failed at line %d: %s\n", __LINE__, #cond); \
            return 1;                                                   \
        }                                                               \
    } while (0)

int main(void) {
    RidSeparation sep;
    CHECK(rid_pairwise_unmac(2.0, 2.0, 5.0, 5.0, 10.0, 10.0, 0.1, &sep) == RID_STATUS_OK);
    CHECK(fabs(sep.unmac_radius - 14.0) < 1e-9);

    CHECK(rid_pairwise_unmac(2.0, 2.0, -5.0, 5.0, 10.0, 10.0, 0.1, &sep) == RID_STATUS_INVALID_PARAMETER);
    char err[128];
    CHECK(rid_last_error(err, sizeof err) > 0);

    RidMessage msg;
    memset(&msg, 0, sizeof msg);
    memcpy(msg.uav_id, "c-smoke-test-id!", 16);
    msg.timestamp = 3.25;
    msg.position_x = 12.5;
    msg.velocity_y = -7.0;
    msg.has_loc_error = 1;
    msg.loc_error = 14.55;

    uint8_t frame[RID_MAX_FRAME_LEN];
    size_t n = 0;
    CHECK(rid_encode(RID_FORMAT_CANDIDATE1, &msg, frame, sizeof frame, &n) == RID_STATUS_OK);
    CHECK(n == 49);

    RidMessage back;
    uint8_t format = 0;
    CHECK(rid_decode(frame, n, &back, &format) == RID_STATUS_OK);
    CHECK(format == RID_FORMAT_CANDIDATE1);
    CHECK(back.position_x == 12.5 && back.velocity_y == -7.0 && back.loc_error == 14.55);

    double r = 0.0;
    CHECK(rid_disk_radius(RID_FORMAT_CANDIDATE1, &msg, 0.1, &r) == RID_STATUS_OK);
    CHECK(fabs(r - (7.5 + 14.55 + 0.7)) < 1e-9);

    RidExperiment *exp = NULL;
    CHECK(rid_experiment_from_toml("runs = 1\npolicies = [\"standard\"]\n[scenario]\nlayout = \"circle8\"\n", &exp)
          == RID_STATUS_OK);
    RidReport *report = NULL;
    CHECK(rid_experiment_run(exp, &report) == RID_STATUS_OK);
    CHECK(rid_report_policy_count(report) == 1);
    RidPolicySummary s;
    CHECK(rid_report_summary(report, 0, &s) == RID_STATUS_OK);
    CHECK(s.flights == 8 && s.mac_count == 0);
    rid_report_free(report);
    rid_experiment_free(exp);

    puts("ok");
    return 0;
}
