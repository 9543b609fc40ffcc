#include <riscv_vector.h>
#include <stddef.h>
#include <stdint.h>

int32_t dot_i16(const int16_t *a, const int16_t *b, size_t n)
{
    size_t vlmax = __riscv_vsetvlmax_e32m4();
    vint32m4_t acc = __riscv_vmv_v_x_i32m4(0, vlmax);
    while (n > 0) {
        size_t vl = __riscv_vsetvl_e16m2(n);
        vint16m2_t va = __riscv_vle16_v_i16m2(a, vl);
        vint16m2_t vb = __riscv_vle16_v_i16m2(b, vl);
        acc = __riscv_vwmacc_vv_i32m4_tu(acc, va, vb, vl);
        a += vl;
        b += vl;
        n -= vl;
    }
    vint32m1_t zero = __riscv_vmv_s_x_i32m1(0, 1);
    vint32m1_t red = __riscv_vredsum_vs_i32m4_i32m1(acc, zero, vlmax);
    return __riscv_vmv_x_s_i32m1_i32(red);
}
