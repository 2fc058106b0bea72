#include <math.h>
#include <stdio.h>
#include <string.h>

#include "sptchain.h"

#define CHECK(call)                                                      \
    do {                                                                 \
        SptStatus st_ = (call);                                          \
        if (st_ != SPT_STATUS_OK) {                                      \
            fprintf(stderr, "%s: %d %s\n", #call, st_, spt_last_error()); \
            return 1;                                                    \
        }                                                                \
    } while (0)

int main(void) {
    SptState *gs = NULL;
    double energy = 0.0;
    CHECK(spt_state_ground("ed", 7, 1.0, &energy, &gs));

    SptCircuit *asp = NULL;
    CHECK(spt_circuit_asp("ed", 7, 12, &asp));
    uint8_t zeros[7] = {0};
    SptState *start = NULL, *prepared = NULL;
    CHECK(spt_state_basis(zeros, 7, &start));
    CHECK(spt_simulate(asp, start, &prepared));

    double fid = 0.0, exact = 0.0;
    CHECK(spt_state_fidelity(prepared, gs, &fid));
    CHECK(spt_string_order_exact(gs, 1, &exact));

    SptShots *raw = NULL, *kept = NULL;
    CHECK(spt_sample(prepared, 4000, 11, &raw));
    CHECK(spt_shots_post_select(raw, 1, &kept));
    double est = 0.0;
    CHECK(spt_string_order_shots(kept, 1, &est));

    SptState *bad = NULL;
    SptStatus st = spt_state_ground("nope", 7, 1.0, NULL, &bad);
    int ok = st == SPT_STATUS_CONFIG && bad == NULL && strlen(spt_last_error()) > 0;
    ok = ok && fid > 0.95 && spt_shots_retention(kept) == 1.0 && fabs(fabs(est) - fabs(exact)) < 0.1;
    printf("energy %.6f fidelity %.4f |Oz1| exact %.4f shots %.4f\n", energy, fid, fabs(exact), fabs(est));

    spt_shots_free(kept);
    spt_shots_free(raw);
    spt_state_free(prepared);
    spt_state_free(start);
    spt_circuit_free(asp);
    spt_state_free(gs);
    return ok ? 0 : 2;
}
