#include <stddef.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>

void h2v1_upsample(const uint8_t *in, uint8_t *out, size_t width);

int main(void)
{
    static const size_t widths[] = {0, 1, 3, 15, 16, 17, 64, 333, 1920};
    for (size_t s = 0; s < sizeof widths / sizeof widths[0]; s++) {
        size_t w = widths[s];
        uint8_t *in = malloc(w + 1), *out = malloc(2 * w + 1);
        for (size_t i = 0; i < w; i++)
            in[i] = (uint8_t)(i * 7 + 3);
        out[2 * w] = 0x77;
        h2v1_upsample(in, out, w);
        for (size_t i = 0; i < w; i++) {
            if (out[2 * i] != in[i] || out[2 * i + 1] != in[i]) {
                printf("FAIL width=%zu i=%zu\n", w, i);
                return 1;
            }
        }
        if (out[2 * w] != 0x77) {
            printf("FAIL width=%zu wrote past the end\n", w);
            return 1;
        }
        free(in);
        free(out);
    }
    puts("PASS");
    return 0;
}
