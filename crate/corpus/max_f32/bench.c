#include <stddef.h>
#include <stdio.h>
#include <stdlib.h>
#include <time.h>

float max_f32(const float *x, size_t n);

#define N 65536
#define REPS 200

int main(void)
{
    float *x = malloc(N * sizeof *x);
    for (size_t i = 0; i < N; i++)
        x[i] = (float)((i * 7919) % 10007) * 0.5f;
    volatile float sink = max_f32(x, N);
    struct timespec t0, t1;
    clock_gettime(CLOCK_MONOTONIC, &t0);
    for (int r = 0; r < REPS; r++)
        sink += max_f32(x, N);
    clock_gettime(CLOCK_MONOTONIC, &t1);
    printf("checksum %g\n", (double)sink);
    printf("%lld\n", (long long)(t1.tv_sec - t0.tv_sec) * 1000000000LL + (t1.tv_nsec - t0.tv_nsec));
    return 0;
}
