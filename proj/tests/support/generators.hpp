#pragma once

// Hand-rolled generators for property tests. Every case gets its own
// generator seeded from (suite seed, case index), so a failure message with
// the case index is enough to replay it.

#include <gtest/gtest.h>

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "gk/core.hpp"
#include "gk/interaction.hpp"

namespace gen {

class Gen {
public:
    Gen(std::uint64_t seed, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(index),
                          0x9e37u};
        rng_.seed(seq);
    }

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }

    std::size_t integer(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }

    bool coin(double p = 0.5) { return uniform() < p; }

    /// Mostly interior values with some mass on the endpoints 0 and 1.
    double unit() {
        const double u = uniform();
        if (u < 0.05) {
            return 0.0;
        }
        if (u < 0.1) {
            return 1.0;
        }
        return uniform();
    }

    /// n non-negative entries summing to rho.
    std::vector<double> distribution(std::size_t n, double rho) {
        std::vector<double> w(n);
        double total = 0.0;
        for (auto& x : w) {
            x = coin(0.2) ? 0.0 : uniform();
            total += x;
        }
        if (total == 0.0) {
            w[integer(0, n - 1)] = rho;
            return w;
        }
        for (auto& x : w) {
            x *= rho / total;
        }
        return w;
    }

    gk::KineticState state(std::size_t m, std::size_t n) {
        gk::KineticState s(m, n);
        for (std::size_t i = 0; i < m; ++i) {
            const auto row = distribution(n, unit());
            for (std::size_t j = 0; j < n; ++j) {
                s(i, j) = row[j];
            }
        }
        return s;
    }

    gk::EnvironmentProfile profile(std::size_t m) {
        gk::EnvironmentProfile p;
        p.alpha.resize(m);
        for (auto& a : p.alpha) {
            a = unit();
        }
        p.beta = unit();
        p.eta0 = uniform(0.1, 3.0);
        return p;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Runs `body(gen, index)` for `cases` generated cases and tags failures
/// with the index.
template <class Body>
void for_all(std::uint64_t seed, std::size_t cases, Body&& body) {
    for (std::size_t c = 0; c < cases; ++c) {
        SCOPED_TRACE(::testing::Message() << "case " << c << " (seed " << seed << ")");
        Gen g(seed, c);
        body(g, c);
        if (::testing::Test::HasFatalFailure() || ::testing::Test::HasNonfatalFailure()) {
            return;
        }
    }
}

}  // namespace gen
