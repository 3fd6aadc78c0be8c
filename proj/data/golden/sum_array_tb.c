#include <stdint.h>
#include <stdio.h>

int32_t sum_array(int32_t a[8]);

int main(void) {
    int failures = 0;
    {
        int32_t a[8] = {1, 2, 3, 4, 5, 6, 7, 8};
        int32_t got = sum_array(a);
        if (got != 36) {
            printf("case 0: got %d, expected 36\n", (int)got);
            failures++;
        }
    }
    {
        int32_t a[8] = {0, 0, 0, 0, 0, 0, 0, 0};
        int32_t got = sum_array(a);
        if (got != 0) {
            printf("case 1: got %d, expected 0\n", (int)got);
            failures++;
        }
    }
    {
        int32_t a[8] = {-5, 10, -15, 20, 1, 1, 1, 1};
        int32_t got = sum_array(a);
        if (got != 14) {
            printf("case 2: got %d, expected 14\n", (int)got);
            failures++;
        }
    }
    if (failures == 0) printf("all tests passed\n");
    return failures != 0;
}
