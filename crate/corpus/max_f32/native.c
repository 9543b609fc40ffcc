#include <math.h>
#include <riscv_vector.h>
#include <stddef.h>

float max_f32(const float *x, size_t n)
{
    size_t vlmax = __riscv_vsetvlmax_e32m8();
    vfloat32m8_t m = __riscv_vfmv_v_f_f32m8(-INFINITY, vlmax);
    for (size_t vl; n > 0; n -= vl, x += vl) {
        vl = __riscv_vsetvl_e32m8(n);
        vfloat32m8_t v = __riscv_vle32_v_f32m8(x, vl);
        m = __riscv_vfmax_vv_f32m8_tu(m, m, v, vl);
    }
    vfloat32m1_t init = __riscv_vfmv_s_f_f32m1(-INFINITY, 1);
    vfloat32m1_t red = __riscv_vfredmax_vs_f32m8_f32m1(m, init, vlmax);
    return __riscv_vfmv_f_s_f32m1_f32(red);
}
