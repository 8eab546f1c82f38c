#include <cstdio>
#include "mtw/constants.hpp"
#include "mtw/counting.hpp"
#include "mtw/circle.hpp"
#include "mtw/quadrature.hpp"
int main() { std::puts("mtw smoke"); return 0; }
