#include <arm_neon.h>
#include <stddef.h>
#include <stdint.h>

int32_t dot_i16(const int16_t *a, const int16_t *b, size_t n)
{
    int32x4_t acc0 = vdupq_n_s32(0);
    int32x4_t acc1 = vdupq_n_s32(0);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        int16x8_t va = vld1q_s16(a + i);
        int16x8_t vb = vld1q_s16(b + i);
        acc0 = vmlal_s16(acc0, vget_low_s16(va), vget_low_s16(vb));
        acc1 = vmlal_high_s16(acc1, va, vb);
    }
    int32_t sum = vaddvq_s32(vaddq_s32(acc0, acc1));
    for (; i < n; i++)
        sum += (int32_t)a[i] * b[i];
    return sum;
}
