#include <riscv_vector.h>
#include <stddef.h>
#include <stdint.h>

void sat_add_u8(const uint8_t *a, const uint8_t *b, uint8_t *dst, size_t n)
{
    for (size_t vl; n > 0; n -= vl, a += vl, b += vl, dst += vl) {
        vl = __riscv_vsetvl_e8m4(n);
        vuint8m4_t va = __riscv_vle8_v_u8m4(a, vl);
        vuint8m4_t vb = __riscv_vle8_v_u8m4(b, vl);
        __riscv_vse8_v_u8m4(dst, __riscv_vsaddu_vv_u8m4(va, vb, vl), vl);
    }
}
