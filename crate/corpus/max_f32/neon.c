#include <arm_neon.h>
#include <math.h>
#include <stddef.h>

float max_f32(const float *x, size_t n)
{
    float32x4_t m0 = vdupq_n_f32(-INFINITY);
    float32x4_t m1 = m0;
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        m0 = vmaxq_f32(m0, vld1q_f32(x + i));
        m1 = vmaxq_f32(m1, vld1q_f32(x + i + 4));
    }
    float best = vmaxvq_f32(vmaxq_f32(m0, m1));
    for (; i < n; i++)
        best = x[i] > best ? x[i] : best;
    return best;
}
