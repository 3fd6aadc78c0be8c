#include <stdint.h>
#include <stdio.h>

int32_t triangular_prism_volume(int32_t base, int32_t height, int32_t length);

int main(void) {
    int failures = 0;
    {
        int32_t got = triangular_prism_volume(1, 1, 1);
        if (got != 0) {
            printf("case 0: got %d, expected 0\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = triangular_prism_volume(2, 3, 4);
        if (got != 12) {
            printf("case 1: got %d, expected 12\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = triangular_prism_volume(3, 5, 7);
        if (got != 52) {
            printf("case 2: got %d, expected 52\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = triangular_prism_volume(10, 10, 10);
        if (got != 500) {
            printf("case 3: got %d, expected 500\n", (int)got);
            failures++;
        }
    }
    if (failures == 0) printf("all tests passed\n");
    return failures != 0;
}
