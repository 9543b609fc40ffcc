#include <arm_neon.h>
#include <stddef.h>
#include <stdint.h>

void sat_add_u8(const uint8_t *a, const uint8_t *b, uint8_t *dst, size_t n)
{
    size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        uint8x16_t a0 = vld1q_u8(a + i);
        uint8x16_t a1 = vld1q_u8(a + i + 16);
        uint8x16_t b0 = vld1q_u8(b + i);
        uint8x16_t b1 = vld1q_u8(b + i + 16);
        vst1q_u8(dst + i, vqaddq_u8(a0, b0));
        vst1q_u8(dst + i + 16, vqaddq_u8(a1, b1));
    }
    for (; i + 8 <= n; i += 8)
        vst1_u8(dst + i, vqadd_u8(vld1_u8(a + i), vld1_u8(b + i)));
    for (; i < n; i++) {
        unsigned s = (unsigned)a[i] + b[i];
        dst[i] = s > 255 ? 255 : (uint8_t)s;
    }
}
