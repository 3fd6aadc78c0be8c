#include <stdint.h>
#include <stdio.h>

int32_t cube(int32_t n);

int main(void) {
    int failures = 0;
    {
        int32_t got = cube(0);
        if (got != 0) {
            printf("case 0: got %d, expected 0\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = cube(1);
        if (got != 1) {
            printf("case 1: got %d, expected 1\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = cube(2);
        if (got != 8) {
            printf("case 2: got %d, expected 8\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = cube(3);
        if (got != 27) {
            printf("case 3: got %d, expected 27\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = cube(-4);
        if (got != -64) {
            printf("case 4: got %d, expected -64\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = cube(10);
        if (got != 1000) {
            printf("case 5: got %d, expected 1000\n", (int)got);
            failures++;
        }
    }
    {
        int32_t got = cube(100);
        if (got != 1000000) {
            printf("case 6: got %d, expected 1000000\n", (int)got);
            failures++;
        }
    }
    if (failures == 0) printf("all tests passed\n");
    return failures != 0;
}
