#include <arm_neon.h>
#include <stddef.h>
#include <stdint.h>

static inline int16_t sat_rdmulh(int16_t a, int16_t b)
{
    int32_t p = (2 * (int32_t)a * b + (1 << 15)) >> 16;
    return p > INT16_MAX ? INT16_MAX : (int16_t)p;
}

void mulhi_q15(const int16_t *a, const int16_t *b, int16_t *dst, size_t n)
{
    size_t i = 0;
    for (; i + 8 <= n; i += 8)
        vst1q_s16(dst + i, vqrdmulhq_s16(vld1q_s16(a + i), vld1q_s16(b + i)));
    for (; i < n; i++)
        dst[i] = sat_rdmulh(a[i], b[i]);
}
