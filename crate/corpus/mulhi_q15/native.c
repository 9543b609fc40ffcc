#include <riscv_vector.h>
#include <stddef.h>
#include <stdint.h>

void mulhi_q15(const int16_t *a, const int16_t *b, int16_t *dst, size_t n)
{
    while (n > 0) {
        size_t vl = __riscv_vsetvl_e16m4(n);
        vint16m4_t va = __riscv_vle16_v_i16m4(a, vl);
        vint16m4_t vb = __riscv_vle16_v_i16m4(b, vl);
        vint16m4_t vr = __riscv_vsmul_vv_i16m4(va, vb, __RISCV_VXRM_RNU, vl);
        __riscv_vse16_v_i16m4(dst, vr, vl);
        a += vl;
        b += vl;
        dst += vl;
        n -= vl;
    }
}
