#include <cstdio>

int main() {
    std::puts("mollify: placeholder");
    return 0;
}
