#include <stddef.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <time.h>

void vector_add(const int32_t *a, const int32_t *b, int32_t *c, size_t n);

#define N 65536
#define REPS 200

int main(void)
{
    int32_t *a = malloc(N * sizeof *a);
    int32_t *b = malloc(N * sizeof *b);
    int32_t *c = malloc(N * sizeof *c);
    for (size_t i = 0; i < N; i++) {
        a[i] = (int32_t)(i * 7);
        b[i] = (int32_t)(i * 3);
    }
    vector_add(a, b, c, N);
    struct timespec t0, t1;
    clock_gettime(CLOCK_MONOTONIC, &t0);
    for (int r = 0; r < REPS; r++)
        vector_add(a, b, c, N);
    clock_gettime(CLOCK_MONOTONIC, &t1);
    long long sum = 0;
    for (size_t i = 0; i < N; i++)
        sum += c[i];
    printf("checksum %lld\n", sum);
    printf("%lld\n", (long long)(t1.tv_sec - t0.tv_sec) * 1000000000LL + (t1.tv_nsec - t0.tv_nsec));
    return 0;
}
