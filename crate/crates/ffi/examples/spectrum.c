/* Lowest rescaled dimensions of the critical Ising chain on 1024 sites. */
#include <stdio.h>

#include "entvir.h"

int main(void) {
    EntvirInterval *interval = NULL;
    if (entvir_interval_new(1.0, 1.0, 1024, &interval) != ENTVIR_STATUS_OK) {
        char msg[256];
        entvir_last_error_message(msg, sizeof msg);
        fprintf(stderr, "entvir: %s\n", msg);
        return 1;
    }
    double h[9];
    entvir_interval_dimensions(interval, 9, 0.0375, h);
    for (int a = 0; a < 9; a++) {
        printf("h_%d = %.4f\n", a + 1, h[a]);
    }
    entvir_interval_free(interval);
    return 0;
}
