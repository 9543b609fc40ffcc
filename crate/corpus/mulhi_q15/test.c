#include <stddef.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>

void mulhi_q15(const int16_t *a, const int16_t *b, int16_t *dst, size_t n);

static int16_t reference(int16_t a, int16_t b)
{
    int32_t p = (2 * (int32_t)a * b + (1 << 15)) >> 16;
    return p > INT16_MAX ? INT16_MAX : (int16_t)p;
}

static uint32_t seed = 31337u;

static int16_t next(void)
{
    seed = seed * 1103515245u + 12345u;
    return (int16_t)(seed >> 16);
}

int main(void)
{
    static const size_t sizes[] = {0, 1, 7, 8, 9, 24, 77, 512, 1031};
    for (size_t s = 0; s < sizeof sizes / sizeof sizes[0]; s++) {
        size_t n = sizes[s];
        int16_t *a = malloc((n + 1) * sizeof *a), *b = malloc((n + 1) * sizeof *b);
        int16_t *d = malloc((n + 1) * sizeof *d);
        for (size_t i = 0; i <= n; i++) {
            a[i] = next();
            b[i] = next();
            d[i] = 0x1234;
        }
        if (n > 2) {
            a[0] = b[0] = INT16_MIN;
            a[1] = INT16_MIN;
            b[1] = INT16_MAX;
        }
        mulhi_q15(a, b, d, n);
        for (size_t i = 0; i < n; i++) {
            if (d[i] != reference(a[i], b[i])) {
                printf("FAIL n=%zu i=%zu a=%d b=%d got %d want %d\n", n, i, a[i], b[i], d[i],
                       reference(a[i], b[i]));
                return 1;
            }
        }
        if (d[n] != 0x1234) {
            printf("FAIL n=%zu wrote past the end\n", n);
            return 1;
        }
        free(a);
        free(b);
        free(d);
    }
    puts("PASS");
    return 0;
}
