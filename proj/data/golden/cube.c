#include <stdint.h>

int32_t cube(int32_t n) {
    return n * n * n;
}
