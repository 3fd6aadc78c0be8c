#include <stdint.h>

int32_t sum_array(int32_t a[8]) {
    #pragma HLS ARRAY_PARTITION variable=a cyclic factor=8 dim=1
    int32_t s = 0;
    L1: for (int32_t i = 0; i < 8; i++) {
        #pragma HLS UNROLL factor=8
        s = s + a[i];
    }
    return s;
}
