#include <stddef.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <time.h>

int32_t dot_i16(const int16_t *a, const int16_t *b, size_t n);

#define N 65536
#define REPS 200

int main(void)
{
    int16_t *a = malloc(N * sizeof *a), *b = malloc(N * sizeof *b);
    for (size_t i = 0; i < N; i++) {
        a[i] = (int16_t)(i % 61 - 30);
        b[i] = (int16_t)(i % 17 - 8);
    }
    volatile int32_t sink = dot_i16(a, b, N);
    struct timespec t0, t1;
    clock_gettime(CLOCK_MONOTONIC, &t0);
    for (int r = 0; r < REPS; r++)
        sink += dot_i16(a, b, N);
    clock_gettime(CLOCK_MONOTONIC, &t1);
    printf("checksum %d\n", (int)sink);
    printf("%lld\n", (long long)(t1.tv_sec - t0.tv_sec) * 1000000000LL + (t1.tv_nsec - t0.tv_nsec));
    return 0;
}
