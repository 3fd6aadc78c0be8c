#include <stdint.h>

int32_t triangle_number(int32_t n) {
    int32_t t = 0;
    L1: for (int32_t i = 1; i < n + 1; i++) {
        #pragma HLS PIPELINE II=1
        t = t + i;
    }
    return t;
}
