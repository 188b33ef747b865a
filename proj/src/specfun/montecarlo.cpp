#include "spinsense/montecarlo.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>

#include <omp.h>

namespace spinsense {

namespace {

std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void validate(const std::vector<Interval>& bounds, const McSpec& spec)
{
    if (bounds.empty()) throw std::invalid_argument("mc_integrate: dimension must be >= 1");
    if (spec.samples < 1) throw std::invalid_argument("mc_integrate: samples must be >= 1");
    if (spec.batch_count < 2 || spec.samples % spec.batch_count != 0)
        throw std::invalid_argument("mc_integrate: batch_count must be >= 2 and divide samples");
}

double batch_sum(const McIntegrand& f, const std::vector<Interval>& bounds, const McSpec& spec, std::uint64_t b)
{
    const std::size_t dim = bounds.size();
    const std::uint64_t per = spec.samples / spec.batch_count;
    const std::uint64_t key = mix64(spec.seed);
    std::vector<double> x(dim);
    double sum = 0.0, comp = 0.0;
    for (std::uint64_t i = b * per; i < (b + 1) * per; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double u = counter_uniform(key, i * dim + j);
            x[j] = bounds[j].first + (bounds[j].second - bounds[j].first) * u;
        }
        const double y = f(x.data()) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

McResult combine(const std::vector<double>& sums, const std::vector<Interval>& bounds, const McSpec& spec)
{
    double volume = 1.0;
    for (const auto& iv : bounds) volume *= iv.second - iv.first;
    const double per = double(spec.samples / spec.batch_count);
    const double nb = double(spec.batch_count);
    double mean = 0.0;
    for (double s : sums) mean += s / per;
    mean /= nb;
    double var = 0.0;
    for (double s : sums) {
        const double d = s / per - mean;
        var += d * d;
    }
    var /= (nb - 1.0);
    return {volume * mean, volume * std::sqrt(var / nb)};
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t counter)
{
    const std::uint64_t z = mix64(seed + (counter + 1) * 0x9E3779B97F4A7C15ULL);
    return (double(z >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    return mix64(mix64(master) ^ (0xD1B54A32D192ED03ULL * (index + 1)));
}

McResult mc_integrate(const McIntegrand& f, const std::vector<Interval>& bounds, const McSpec& spec, int workers)
{
    validate(bounds, spec);
    std::vector<double> sums(spec.batch_count, 0.0);
    std::exception_ptr failure;
    const long long nb = static_cast<long long>(spec.batch_count);
    const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long b = 0; b < nb; ++b) {
        try {
            sums[b] = batch_sum(f, bounds, spec, std::uint64_t(b));
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return combine(sums, bounds, spec);
}

McResult mc_integrate_serial(const McIntegrand& f, const std::vector<Interval>& bounds, const McSpec& spec)
{
    validate(bounds, spec);
    std::vector<double> sums(spec.batch_count, 0.0);
    for (std::uint64_t b = 0; b < spec.batch_count; ++b) sums[b] = batch_sum(f, bounds, spec, b);
    return combine(sums, bounds, spec);
}

}  // namespace spinsense
