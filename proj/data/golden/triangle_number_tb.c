#include <stdint.h>
#include <stdio.h>

int32_t triangle_number(int32_t n);

int main(void) {
    int failures = 0;
    {
        int32_t got = triangle_number(0);
        if (got != 0) {
            printf("case 0: got %d, expected 0\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = triangle_number(1);
        if (got != 1) {
            printf("case 1: got %d, expected 1\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = triangle_number(2);
        if (got != 3) {
            printf("case 2: got %d, expected 3\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = triangle_number(5);
        if (got != 15) {
            printf("case 3: got %d, expected 15\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = triangle_number(10);
        if (got != 55) {
            printf("case 4: got %d, expected 55\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = triangle_number(100);
        if (got != 5050) {
            printf("case 5: got %d, expected 5050\n", (int)got);
            failures++;
        }
    }
    if (failures == 0) printf("all tests passed\n");
    return failures != 0;
}
