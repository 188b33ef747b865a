#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace spinsense {

struct McSpec {
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 1;
    std::uint64_t batch_count = 100;
};

struct McResult {
    double value = 0.0;
    double std_error = 0.0;
};

using Interval = std::pair<double, double>;
using McIntegrand = std::function<double(const double*)>;

// Uniform in (0,1) from a counter; identical for any evaluation order.
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

// Derives an independent stream seed, e.g. per sweep point.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Batches run in parallel; batch b owns samples [b*m, (b+1)*m).
McResult mc_integrate(const McIntegrand& f, const std::vector<Interval>& bounds, const McSpec& spec,
                      int workers = 0);

// Reference implementation, one batch after another.
McResult mc_integrate_serial(const McIntegrand& f, const std::vector<Interval>& bounds, const McSpec& spec);

}  // namespace spinsense
