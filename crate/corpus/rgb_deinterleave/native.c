#include <riscv_vector.h>
#include <stddef.h>
#include <stdint.h>

void rgb_deinterleave(const uint8_t *rgb, uint8_t *r, uint8_t *g, uint8_t *b, size_t n)
{
    while (n > 0) {
        size_t vl = __riscv_vsetvl_e8m2(n);
        vuint8m2x3_t px = __riscv_vlseg3e8_v_u8m2x3(rgb, vl);
        __riscv_vse8_v_u8m2(r, __riscv_vget_v_u8m2x3_u8m2(px, 0), vl);
        __riscv_vse8_v_u8m2(g, __riscv_vget_v_u8m2x3_u8m2(px, 1), vl);
        __riscv_vse8_v_u8m2(b, __riscv_vget_v_u8m2x3_u8m2(px, 2), vl);
        rgb += 3 * vl;
        r += vl;
        g += vl;
        b += vl;
        n -= vl;
    }
}
