#include <stddef.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>

void vector_add(const int32_t *a, const int32_t *b, int32_t *c, size_t n);

static uint32_t seed = 12345u;

static int32_t next(void)
{
    seed = seed * 1103515245u + 12345u;
    return (int32_t)(seed >> 1) - (1 << 30);
}

int main(void)
{
    static const size_t sizes[] = {0, 1, 3, 4, 7, 16, 33, 100, 1023};
    for (size_t s = 0; s < sizeof sizes / sizeof sizes[0]; s++) {
        size_t n = sizes[s];
        int32_t *a = malloc((n + 1) * sizeof *a);
        int32_t *b = malloc((n + 1) * sizeof *b);
        int32_t *c = malloc((n + 1) * sizeof *c);
        for (size_t i = 0; i <= n; i++) {
            a[i] = next() / 2;
            b[i] = next() / 2;
            c[i] = 0x5a5a5a5a;
        }
        vector_add(a, b, c, n);
        for (size_t i = 0; i < n; i++) {
            if (c[i] != a[i] + b[i]) {
                printf("FAIL n=%zu i=%zu got %d want %d\n", n, i, c[i], a[i] + b[i]);
                return 1;
            }
        }
        if (c[n] != 0x5a5a5a5a) {
            printf("FAIL n=%zu wrote past the end\n", n);
            return 1;
        }
        free(a);
        free(b);
        free(c);
    }
    puts("PASS");
    return 0;
}
