#include <stddef.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <time.h>

void rgb_deinterleave(const uint8_t *rgb, uint8_t *r, uint8_t *g, uint8_t *b, size_t n);

#define N (1 << 16)
#define REPS 100

int main(void)
{
    uint8_t *rgb = malloc(3 * N), *r = malloc(N), *g = malloc(N), *b = malloc(N);
    for (size_t i = 0; i < 3 * N; i++)
        rgb[i] = (uint8_t)(i * 5);
    rgb_deinterleave(rgb, r, g, b, N);
    struct timespec t0, t1;
    clock_gettime(CLOCK_MONOTONIC, &t0);
    for (int k = 0; k < REPS; k++)
        rgb_deinterleave(rgb, r, g, b, N);
    clock_gettime(CLOCK_MONOTONIC, &t1);
    unsigned long sum = 0;
    for (size_t i = 0; i < N; i++)
        sum += r[i] + 2u * g[i] + 3u * b[i];
    printf("checksum %lu\n", sum);
    printf("%lld\n", (long long)(t1.tv_sec - t0.tv_sec) * 1000000000LL + (t1.tv_nsec - t0.tv_nsec));
    return 0;
}
