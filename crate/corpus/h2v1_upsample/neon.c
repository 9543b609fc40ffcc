#include <arm_neon.h>
#include <stddef.h>
#include <stdint.h>

/* Each input sample becomes two identical output samples. */
void h2v1_upsample(const uint8_t *in, uint8_t *out, size_t width)
{
    size_t i = 0;
    for (; i + 16 <= width; i += 16) {
        uint8x16x2_t pair;
        pair.val[0] = vld1q_u8(in + i);
        pair.val[1] = pair.val[0];
        vst2q_u8(out + 2 * i, pair);
    }
    for (; i < width; i++) {
        out[2 * i] = in[i];
        out[2 * i + 1] = in[i];
    }
}
