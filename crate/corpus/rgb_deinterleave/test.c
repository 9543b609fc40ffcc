#include <stddef.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>

void rgb_deinterleave(const uint8_t *rgb, uint8_t *r, uint8_t *g, uint8_t *b, size_t n);

int main(void)
{
    static const size_t sizes[] = {0, 1, 2, 15, 16, 17, 48, 99, 640};
    for (size_t s = 0; s < sizeof sizes / sizeof sizes[0]; s++) {
        size_t n = sizes[s];
        uint8_t *rgb = malloc(3 * n + 1);
        uint8_t *p[3];
        for (int c = 0; c < 3; c++) {
            p[c] = malloc(n + 1);
            p[c][n] = 0xee;
        }
        for (size_t i = 0; i < 3 * n; i++)
            rgb[i] = (uint8_t)(i * 37 + (i >> 3));
        rgb_deinterleave(rgb, p[0], p[1], p[2], n);
        for (size_t i = 0; i < n; i++) {
            for (int c = 0; c < 3; c++) {
                if (p[c][i] != rgb[3 * i + c]) {
                    printf("FAIL n=%zu i=%zu channel %d\n", n, i, c);
                    return 1;
                }
            }
        }
        for (int c = 0; c < 3; c++) {
            if (p[c][n] != 0xee) {
                printf("FAIL n=%zu channel %d wrote past the end\n", n, c);
                return 1;
            }
            free(p[c]);
        }
        free(rgb);
    }
    puts("PASS");
    return 0;
}
