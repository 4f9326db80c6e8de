#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace blens {

// Neumaier compensated accumulator. add() keeps a running correction term so
// that sums of a few million doubles stay within a couple of ulps.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

inline double compensated_total(const std::vector<double>& xs) {
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

// splitmix64. Chosen over std::mt19937 because the byte stream is pinned by
// the algorithm itself, not by a library implementation, so reports built
// from it are reproducible across toolchains.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // uniform in [0,1), 53 random bits
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return next() % n; }
};

// Exact floor(sqrt(n)) for n >= 0.
inline long long isqrt_ll(long long n) {
    if (n < 0) throw std::invalid_argument("isqrt of negative");
    if (n == 0) return 0;
    long long r = static_cast<long long>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// Static block partition over [0, n). Results must be written to per-index
// slots; the reduction order is then independent of the worker count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

// Worker count: explicit request, else BILLIARD_LENS_THREADS, else hardware.
unsigned resolve_thread_count(unsigned requested);

}  // namespace blens
