#include <stddef.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <time.h>

void sat_add_u8(const uint8_t *a, const uint8_t *b, uint8_t *dst, size_t n);

#define N (1 << 18)
#define REPS 100

int main(void)
{
    uint8_t *a = malloc(N), *b = malloc(N), *d = malloc(N);
    for (size_t i = 0; i < N; i++) {
        a[i] = (uint8_t)(i * 13);
        b[i] = (uint8_t)(i * 29 + 100);
    }
    sat_add_u8(a, b, d, N);
    struct timespec t0, t1;
    clock_gettime(CLOCK_MONOTONIC, &t0);
    for (int r = 0; r < REPS; r++)
        sat_add_u8(a, b, d, N);
    clock_gettime(CLOCK_MONOTONIC, &t1);
    unsigned long sum = 0;
    for (size_t i = 0; i < N; i++)
        sum += d[i];
    printf("checksum %lu\n", sum);
    printf("%lld\n", (long long)(t1.tv_sec - t0.tv_sec) * 1000000000LL + (t1.tv_nsec - t0.tv_nsec));
    return 0;
}
