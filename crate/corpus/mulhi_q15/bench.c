#include <stddef.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <time.h>

void mulhi_q15(const int16_t *a, const int16_t *b, int16_t *dst, size_t n);

#define N 65536
#define REPS 200

int main(void)
{
    int16_t *a = malloc(N * sizeof *a), *b = malloc(N * sizeof *b), *d = malloc(N * sizeof *d);
    for (size_t i = 0; i < N; i++) {
        a[i] = (int16_t)(i * 211);
        b[i] = (int16_t)(i * 97 + 5);
    }
    mulhi_q15(a, b, d, N);
    struct timespec t0, t1;
    clock_gettime(CLOCK_MONOTONIC, &t0);
    for (int r = 0; r < REPS; r++)
        mulhi_q15(a, b, d, N);
    clock_gettime(CLOCK_MONOTONIC, &t1);
    long sum = 0;
    for (size_t i = 0; i < N; i++)
        sum += d[i];
    printf("checksum %ld\n", sum);
    printf("%lld\n", (long long)(t1.tv_sec - t0.tv_sec) * 1000000000LL + (t1.tv_nsec - t0.tv_nsec));
    return 0;
}
