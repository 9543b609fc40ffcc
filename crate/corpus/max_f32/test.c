#include <math.h>
#include <stddef.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>

float max_f32(const float *x, size_t n);

static uint32_t seed = 99u;

static float next(void)
{
    seed = seed * 1664525u + 1013904223u;
    return (float)((int32_t)(seed >> 8) % 100000) / 7.0f - 5000.0f;
}

int main(void)
{
    static const size_t sizes[] = {1, 2, 4, 7, 8, 9, 63, 64, 65, 1001};
    for (size_t s = 0; s < sizeof sizes / sizeof sizes[0]; s++) {
        size_t n = sizes[s];
        for (size_t where = 0; where < 3; where++) {
            float *x = malloc((n + 1) * sizeof *x);
            for (size_t i = 0; i < n; i++)
                x[i] = next();
            size_t peak = where == 0 ? 0 : where == 1 ? n / 2 : n - 1;
            x[peak] = 1.0e6f;
            x[n] = 1.0e9f;
            float got = max_f32(x, n);
            if (got != 1.0e6f) {
                printf("FAIL n=%zu peak=%zu got %g\n", n, peak, (double)got);
                return 1;
            }
            free(x);
        }
    }
    float neg[3] = {-3.0f, -1.5f, -2.0f};
    if (max_f32(neg, 3) != -1.5f) {
        puts("FAIL all-negative input");
        return 1;
    }
    if (!(max_f32(neg, 0) < -1.0e30f)) {
        puts("FAIL empty input must return -inf");
        return 1;
    }
    puts("PASS");
    return 0;
}
