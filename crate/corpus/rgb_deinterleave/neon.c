#include <arm_neon.h>
#include <stddef.h>
#include <stdint.h>

void rgb_deinterleave(const uint8_t *rgb, uint8_t *r, uint8_t *g, uint8_t *b, size_t n)
{
    size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        uint8x16x3_t px = vld3q_u8(rgb + 3 * i);
        vst1q_u8(r + i, px.val[0]);
        vst1q_u8(g + i, px.val[1]);
        vst1q_u8(b + i, px.val[2]);
    }
    for (; i < n; i++) {
        r[i] = rgb[3 * i];
        g[i] = rgb[3 * i + 1];
        b[i] = rgb[3 * i + 2];
    }
}
