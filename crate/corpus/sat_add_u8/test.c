#include <stddef.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>

void sat_add_u8(const uint8_t *a, const uint8_t *b, uint8_t *dst, size_t n);

static uint32_t seed = 777u;

static uint8_t next(void)
{
    seed = seed * 1664525u + 1013904223u;
    return (uint8_t)(seed >> 24);
}

int main(void)
{
    static const size_t sizes[] = {0, 1, 7, 8, 15, 31, 32, 65, 257, 4099};
    for (size_t s = 0; s < sizeof sizes / sizeof sizes[0]; s++) {
        size_t n = sizes[s];
        uint8_t *a = malloc(n + 1), *b = malloc(n + 1), *d = malloc(n + 1);
        for (size_t i = 0; i <= n; i++) {
            a[i] = next();
            b[i] = (i % 5 == 0) ? 255 : next();
            d[i] = 0xa5;
        }
        sat_add_u8(a, b, d, n);
        for (size_t i = 0; i < n; i++) {
            unsigned want = (unsigned)a[i] + b[i];
            if (want > 255)
                want = 255;
            if (d[i] != want) {
                printf("FAIL n=%zu i=%zu got %u want %u\n", n, i, d[i], want);
                return 1;
            }
        }
        if (d[n] != 0xa5) {
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
