#include <doctest.h>

#include <cmath>

#include "evplan/kernels.hpp"
#include "evplan/rng.hpp"

using namespace evplan;

TEST_CASE("gravity rows: serial and parallel agree bit for bit") {
    const std::size_t n = 60;
    KeyedRng rng(1);
    std::vector<double> a(n), d(n * n);
    for (auto& x : a) x = std::floor(10.0 * rng.uniform());
    a[3] = 0.0;
    for (auto& x : d) x = 0.5 + 20.0 * rng.uniform();
    std::vector<double> s(n * n), p(n * n);
    kernels::gravity_rows(a, d, 0.236, s, Execution::serial);
    kernels::gravity_rows(a, d, 0.236, p, Execution::parallel);
    CHECK(s == p);
    for (std::size_t i = 0; i < n; ++i) CHECK(s[i * n + 3] == 0.0);
}

TEST_CASE("pulse binning: serial and parallel agree and conserve energy") {
    KeyedRng rng(2);
    std::vector<kernels::Pulse> pulses;
    double e = 0.0;
    for (int z = 0; z < 9; ++z)
        for (int k = 0; k < 500; ++k) {
            kernels::Pulse p{z, 1.0 + 21.0 * rng.uniform(), 24.0 * rng.uniform(), 30.0 * rng.uniform()};
            e += p.power_kw * p.duration_h;
            pulses.push_back(p);
        }
    std::vector<double> s(9 * 96), p(9 * 96);
    kernels::bin_pulses(pulses, 9, 0.25, s, Execution::serial);
    kernels::bin_pulses(pulses, 9, 0.25, p, Execution::parallel);
    CHECK(s == p);
    const auto total = kernels::sum_zone_series(s, 9, 96);
    double sum = 0.0;
    for (double v : total) sum += v * 0.25;
    CHECK(std::abs(sum - e) / e < 1e-9);
}

TEST_CASE("thread limit") {
    set_thread_limit(2);
    CHECK(thread_count() <= 2);
    set_thread_limit(0);
    CHECK(thread_count() >= 1);
}
