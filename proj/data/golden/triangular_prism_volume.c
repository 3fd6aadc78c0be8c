#include <stdint.h>

int32_t triangular_prism_volume(int32_t base, int32_t height, int32_t length) {
    return base * height * length / 2 - (base * height * length % 2 < 0);
}
