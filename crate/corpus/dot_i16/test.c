#include <stddef.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>

int32_t dot_i16(const int16_t *a, const int16_t *b, size_t n);

static uint32_t seed = 4242u;

static int16_t next(void)
{
    seed = seed * 1103515245u + 12345u;
    return (int16_t)((int32_t)(seed >> 16) % 2001 - 1000);
}

int main(void)
{
    static const size_t sizes[] = {0, 1, 5, 8, 9, 16, 31, 100, 1000, 2049};
    for (size_t s = 0; s < sizeof sizes / sizeof sizes[0]; s++) {
        size_t n = sizes[s];
        int16_t *a = malloc((n + 1) * sizeof *a), *b = malloc((n + 1) * sizeof *b);
        for (size_t i = 0; i < n; i++) {
            a[i] = next();
            b[i] = next();
        }
        a[n] = 30000;
        b[n] = 30000;
        int32_t want = 0;
        for (size_t i = 0; i < n; i++)
            want += (int32_t)a[i] * b[i];
        int32_t got = dot_i16(a, b, n);
        if (got != want) {
            printf("FAIL n=%zu got %d want %d\n", n, got, want);
            return 1;
        }
        free(a);
        free(b);
    }
    puts("PASS");
    return 0;
}
