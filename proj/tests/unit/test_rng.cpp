#include "sbmlab/rng.hpp"
#include "sbmlab/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <cmath>
#include <vector>

using namespace sbm;

TEST_SUITE("rng") {
    TEST_CASE("same key gives the same sequence") {
        RngStream a(42, 7), b(42, 7);
        for (int i = 0; i < 1000; ++i) CHECK(a() == b());
    }

    TEST_CASE("different stream ids diverge") {
        RngStream a(42, 7), b(42, 8);
        int equal = 0;
        for (int i = 0; i < 1000; ++i) equal += a() == b();
        CHECK(equal == 0);
    }

    TEST_CASE("derive leaves the parent untouched") {
        RngStream a(1, 0), b(1, 0);
        auto child = a.derive(3);
        (void)child();
        CHECK(a() == b());
        CHECK(a.derive(3).key() == b.derive(3).key());
        CHECK(a.derive(3).key() != a.derive(4).key());
    }

    TEST_CASE("uniform stays in the open interval with the right moments") {
        RngStream r(5);
        Accumulator acc;
        for (int i = 0; i < 200000; ++i) {
            const double u = r.uniform();
            REQUIRE(u > 0.0);
            REQUIRE(u < 1.0);
            acc.add(u);
        }
        CHECK(acc.mean() == doctest::Approx(0.5).epsilon(0.01));
        CHECK(acc.variance() == doctest::Approx(1.0 / 12.0).epsilon(0.01));
    }

    TEST_CASE("normal and exponential moments") {
        RngStream r(6);
        Accumulator n, e;
        for (int i = 0; i < 200000; ++i) {
            n.add(r.normal());
            e.add(r.exponential());
        }
        CHECK(std::abs(n.mean()) < 4.0 * n.stderr_of_mean());
        CHECK(n.variance() == doctest::Approx(1.0).epsilon(0.01));
        CHECK(std::abs(e.mean() - 1.0) < 4.0 * e.stderr_of_mean());
    }

    TEST_CASE("poisson mean and variance across both sampling branches") {
        for (double mean : {0.3, 4.0, 11.9, 12.0, 75.0, 2500.0}) {
            RngStream r(7, static_cast<std::uint64_t>(mean * 10));
            Accumulator acc;
            for (int i = 0; i < 100000; ++i) acc.add(static_cast<double>(r.poisson(mean)));
            CHECK(std::abs(acc.mean() - mean) < 4.0 * std::sqrt(mean / 1e5));
            CHECK(acc.variance() == doctest::Approx(mean).epsilon(0.03));
        }
        RngStream r(1);
        CHECK(r.poisson(0.0) == 0);
    }

    TEST_CASE("gamma mean and variance, including shape below one") {
        for (double shape : {0.3, 1.0, 2.5, 40.0}) {
            RngStream r(8, static_cast<std::uint64_t>(shape * 10));
            Accumulator acc;
            for (int i = 0; i < 100000; ++i) acc.add(r.gamma(shape));
            CHECK(std::abs(acc.mean() - shape) < 4.0 * std::sqrt(shape / 1e5));
            CHECK(acc.variance() == doctest::Approx(shape).epsilon(0.04));
        }
        RngStream r(1);
        CHECK_THROWS_AS(r.gamma(0.0), std::domain_error);
    }

    TEST_CASE("quantile inverses are monotone and consistent with the CDFs") {
        std::uint64_t prev = 0;
        for (double u = 0.01; u < 1.0; u += 0.01) {
            const auto k = poisson_quantile(6.5, u);
            CHECK(k >= prev);
            prev = k;
            // smallest k with P(N <= k) >= u
            CHECK(boost::math::gamma_q(static_cast<double>(k + 1), 6.5) >= u - 1e-12);
            if (k > 0) CHECK(boost::math::gamma_q(static_cast<double>(k), 6.5) < u + 1e-12);
        }
        for (double m : {0.5, 1.0, 3.0})
            CHECK(poisson_quantile(m, 0.7) <= poisson_quantile(m + 1.0, 0.7));
        for (double u : {0.05, 0.5, 0.95})
            CHECK(boost::math::gamma_p(3.0, gamma_quantile(3.0, u)) == doctest::Approx(u).epsilon(1e-10));
    }
}
