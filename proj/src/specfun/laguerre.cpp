#include "spinsense/specfun.hpp"

#include <stdexcept>

namespace spinsense {

double assoc_laguerre(int n, int k, double x)
{
    if (n < 0 || k < 0) throw std::domain_error("assoc_laguerre: n and k must be non-negative");
    double lm1 = 1.0;
    if (n == 0) return lm1;
    double l = 1.0 + k - x;
    for (int m = 1; m < n; ++m) {
        const double next = ((2.0 * m + 1.0 + k - x) * l - (m + k) * lm1) / (m + 1.0);
        lm1 = l;
        l = next;
    }
    return l;
}

}  // namespace spinsense
