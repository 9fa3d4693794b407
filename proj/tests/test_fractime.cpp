#include <doctest.h>

#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fracdiff/errors.hpp"
#include "fracdiff/fractime.hpp"

using namespace fracdiff;
using namespace fracdiff::fractime;

namespace {

std::vector<double> sample(const TimeGrid& g, double (*u)(double)) {
    std::vector<double> v(static_cast<std::size_t>(g.k()) + 1);
    for (long j = 0; j <= g.k(); ++j) v[static_cast<std::size_t>(j)] = u(g.node(j));
    return v;
}

// Rescaled Caputo derivative of t^mu at t = 1 (a = 0).
double power_closed_form(double mu, double a) {
    return std::tgamma(1.0 - a) * std::tgamma(mu + 1.0) / std::tgamma(mu + 1.0 - a);
}

}  // namespace

TEST_CASE("grids and series validate their inputs") {
    CHECK_THROWS_AS(TimeGrid(1.0, 1.0, 4), DomainError);
    CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 0), DomainError);
    const TimeGrid g(-0.3, 0.7, 3);
    CHECK(g.node(3) == 0.7);
    CHECK(g.eps() == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(TimeSeries(g, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(TimeSeries(g, {1.0, 2.0, std::nan(""), 0.0}), DomainError);
}

TEST_CASE("weights: small cases") {
    const FracOrder a(0.5);
    const auto w1 = caputo_weights(a, 1, HistoryExtension::ZeroBeforeA);
    REQUIRE(w1.c.size() == 1);
    CHECK(w1.c[0] == 1.0);
    CHECK(w1.tail == 0.0);

    for (auto ext : {HistoryExtension::ConstantBeforeA, HistoryExtension::ZeroBeforeA, HistoryExtension::EvenReflectAfterT}) {
        const auto w2 = caputo_weights(a, 2, ext);
        CHECK(w2.c[0] == 1.0);
        CHECK(w2.c[1] == doctest::Approx(0.353553390593274).epsilon(1e-14));
    }

    const auto t1 = caputo_weights(a, 1, HistoryExtension::ConstantBeforeA);
    CHECK(t1.tail == doctest::Approx(boost::math::zeta(1.5) - 1.0).epsilon(1e-12));
    CHECK(t1.tail == doctest::Approx(1.612375).epsilon(1e-6));
    CHECK_THROWS_AS(caputo_weights(a, 0, HistoryExtension::ConstantBeforeA), DomainError);
}

TEST_CASE("weights are positive and sum to zeta(1 + alpha)") {
    for (double al : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        const FracOrder a(al);
        const double z = boost::math::zeta(1.0 + al);
        CHECK(caputo_total_weight(a) == doctest::Approx(z).epsilon(1e-12));
        for (long j : {1L, 2L, 7L, 100L, 1000L}) {
            const auto w = caputo_weights(a, j, HistoryExtension::ConstantBeforeA);
            double sum = w.tail;
            for (double c : w.c) {
                CHECK(c > 0.0);
                sum += c;
            }
            CHECK(w.tail > 0.0);
            CHECK(sum == doctest::Approx(z).epsilon(1e-12));
        }
    }
}

TEST_CASE("constants have zero derivative under every extension") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> U(-50.0, 50.0);
    for (auto ext : {HistoryExtension::ConstantBeforeA, HistoryExtension::ZeroBeforeA, HistoryExtension::EvenReflectAfterT})
        for (double al : {0.2, 0.5, 0.8})
            for (long k : {1L, 5L, 64L}) {
                const double c = U(gen);
                const TimeSeries u(TimeGrid(-1.0, 2.5, k), std::vector<double>(static_cast<std::size_t>(k) + 1, c), ext);
                for (long j = 1; j <= k; ++j) CHECK(std::abs(discrete_caputo(u, FracOrder(al), j)) < 1e-12 * (1.0 + std::abs(c)));
            }
    const TimeSeries seven(TimeGrid(0.0, 1.0, 10), std::vector<double>(11, 7.0));
    CHECK(discrete_caputo(seven, FracOrder(0.37), 10) == 0.0);
}

TEST_CASE("discrete derivative is linear") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const TimeGrid g(0.0, 1.0, 40);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> u(41), v(41), s(41);
        for (std::size_t i = 0; i < 41; ++i) {
            u[i] = U(gen);
            v[i] = U(gen);
            s[i] = u[i] + v[i];
        }
        const FracOrder a(0.3 + 0.02 * trial);
        for (long j = 1; j <= 40; ++j) {
            const double lhs = discrete_caputo(TimeSeries(g, s), a, j);
            const double rhs = discrete_caputo(TimeSeries(g, u), a, j) + discrete_caputo(TimeSeries(g, v), a, j);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
        }
    }
}

TEST_CASE("discrete derivative of t converges to 2 at alpha = 1/2") {
    const double exact = power_closed_form(1.0, 0.5);
    CHECK(exact == doctest::Approx(2.0).epsilon(1e-14));
    double prev = 0.0;
    for (long k = 64; k <= 2048; k *= 2) {
        const TimeGrid g(0.0, 1.0, k);
        const double err = std::abs(discrete_caputo(TimeSeries(g, sample(g, [](double t) { return t; })), FracOrder(0.5), k) - exact);
        if (prev > 0.0) CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.02);
}

TEST_CASE("discrete derivative converges at order 1 - alpha") {
    for (double al : {0.25, 0.5, 0.75})
        for (double mu : {1.0, 2.0}) {
            const double exact = power_closed_form(mu, al);
            const auto err = [&](long k) {
                const TimeGrid g(0.0, 1.0, k);
                std::vector<double> u(static_cast<std::size_t>(k) + 1);
                for (long j = 0; j <= k; ++j) u[static_cast<std::size_t>(j)] = std::pow(g.node(j), mu);
                return std::abs(discrete_caputo(TimeSeries(g, u), FracOrder(al), k) - exact);
            };
            const double order = std::log2(err(1024) / err(2048));
            CAPTURE(al);
            CAPTURE(mu);
            CHECK(order == doctest::Approx(1.0 - al).epsilon(2e-3));
        }
}

TEST_CASE("caputo quadrature closed forms") {
    for (double al : {0.2, 0.6})
        CHECK(std::abs(caputo_quadrature([](double) { return 3.0; }, FracOrder(al), 0.0, 0.8, 50)) < 1e-14);
    const double d1 = caputo_quadrature([](double t) { return t; }, FracOrder(0.5), 0.0, 1.0, 10000);
    CHECK(std::abs(d1 - 2.0) < 1e-3);
    const double d2 = caputo_quadrature([](double t) { return t * t; }, FracOrder(0.25), 0.0, 1.0, 10000);
    CHECK(std::abs(d2 - power_closed_form(2.0, 0.25)) < 1e-3);
    // Shifted origin: u = (t - a)^2 on [a, t] behaves like s^2 on [0, t - a].
    const double d3 = caputo_quadrature([](double t) { return (t + 2.0) * (t + 2.0); }, FracOrder(0.25), -2.0, -1.0, 10000);
    CHECK(std::abs(d3 - power_closed_form(2.0, 0.25)) < 1e-3);
    CHECK_THROWS_AS(caputo_quadrature([](double t) { return t; }, FracOrder(0.5), 0.0, 1.0, 1), DomainError);
    CHECK_THROWS_AS(caputo_quadrature([](double t) { return t; }, FracOrder(0.5), 1.0, 1.0, 8), DomainError);
}

TEST_CASE("discrete and quadrature derivatives agree in the limit") {
    const auto u = [](double t) { return std::sin(2.0 * t) + t * t; };
    const double q = caputo_quadrature(u, FracOrder(0.4), 0.0, 1.0, 20000);
    double prev = 1e9;
    for (long k = 128; k <= 2048; k *= 4) {
        const TimeGrid g(0.0, 1.0, k);
        std::vector<double> v(static_cast<std::size_t>(k) + 1);
        for (long j = 0; j <= k; ++j) v[static_cast<std::size_t>(j)] = u(g.node(j));
        const double err = std::abs(discrete_caputo(TimeSeries(g, v), FracOrder(0.4), k) - q);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-2);
}

TEST_CASE("lower sum bound over the infinite past") {
    for (double al : {0.2, 0.5, 0.8})
        for (long j : {2L, 5L, 40L, 300L})
            for (long l = 0; l < j; l += std::max(1L, j / 7)) {
                // sum_{i < l} (j - i)^{-(1+alpha)} = sum_{n > j - l} n^{-(1+alpha)}
                const double lhs = boost::math::zeta(1.0 + al) - [&] {
                    double s = 0.0;
                    for (long n = 1; n <= j - l; ++n) s += std::pow(static_cast<double>(n), -(1.0 + al));
                    return s;
                }();
                const double rhs = std::pow(2.0, -(1.0 + al)) * std::pow(static_cast<double>(j - l), -al) / al;
                CHECK(lhs >= rhs);
            }
}

TEST_CASE("barrier bound") {
    const FracOrder a(0.5);
    const auto b = barrier_bound_check(0.2, a, TimeGrid(-10.0, 1.0, 1100));
    const double closed = 0.2 * std::tgamma(0.5) * std::tgamma(0.3) / std::tgamma(0.8);
    CHECK(b.reference_c == doctest::Approx(closed).epsilon(1e-10));
    CHECK(std::isfinite(b.min_full));
    CHECK(b.min_full >= -b.reference_c);
    CHECK(b.min_anchored >= b.min_full);
    CHECK(b.monotone_ok);
    CHECK(b.argmin_full == doctest::Approx(-1.0));

    for (auto [nu, al] : {std::pair{0.1, 0.3}, {0.3, 0.7}, {0.05, 0.9}})
        CHECK(barrier_reference_constant(nu, FracOrder(al)) ==
              doctest::Approx(nu * std::tgamma(1.0 - al) * std::tgamma(al - nu) / std::tgamma(1.0 - nu)).epsilon(1e-10));

    CHECK_THROWS_AS(barrier_bound_check(0.5, a, TimeGrid(-10.0, 1.0, 100)), DomainError);
    CHECK_THROWS_AS(barrier_bound_check(0.2, a, TimeGrid(-0.5, 1.0, 100)), DomainError);
}

TEST_CASE("integration by parts defect") {
    const FracOrder a(0.5);
    CHECK(ibp_defect([](double) { return 0.0; }, [](double t) { return std::cos(t); }, a, 0.0, 1.0, 64) == 0.0);
    CHECK(ibp_defect([](double) { return 2.0; }, [](double) { return 2.0; }, a, 0.0, 1.0, 4096) < 1e-10);

    const auto g = [](double t) { return t; };
    const auto h = [](double t) { return t * t; };
    double prev = ibp_defect(g, h, a, 0.0, 1.0, 128);
    for (long M = 256; M <= 1024; M *= 2) {
        const double d = ibp_defect(g, h, a, 0.0, 1.0, M);
        CHECK(std::log2(prev / d) >= 1.0);
        prev = d;
    }
    CHECK(ibp_defect(g, h, a, 0.0, 1.0, 4096) < 1e-3);
    CHECK_THROWS_AS(ibp_defect(g, h, a, 0.0, 1.0, 1), DomainError);
}

TEST_CASE("extension energy") {
    const FracOrder a(0.5);
    const TimeGrid g(0.0, 1.0, 32);
    const auto zero = extension_energy_ratio(TimeSeries(g, std::vector<double>(33, 0.0), HistoryExtension::ZeroBeforeA), a);
    CHECK(zero.extended == 0.0);
    CHECK(zero.bound == 0.0);

    // u = 1 on (0, 1]: a unit indicator of length 2 after reflection.
    const auto one = extension_energy_ratio(TimeSeries(g, std::vector<double>(33, 1.0), HistoryExtension::EvenReflectAfterT), a);
    CHECK(one.extended == doctest::Approx(4.0 * std::pow(2.0, 0.5) / 0.5).epsilon(1e-12));
    CHECK(one.bound == doctest::Approx(8.0 / 0.5).epsilon(1e-12));
    CHECK(one.extended <= one.bound);

    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const long k = 8 + 6 * trial;
        std::vector<double> u(static_cast<std::size_t>(k) + 1);
        double x = 0.0;
        for (auto& v : u) v = (x += U(gen));
        const auto e = extension_energy_ratio(TimeSeries(TimeGrid(0.0, 2.0, k), u, HistoryExtension::ZeroBeforeA),
                                              FracOrder(0.15 + 0.035 * trial));
        CHECK(e.extended <= e.bound);
    }
    CHECK_THROWS_AS(extension_energy_ratio(TimeSeries(g, std::vector<double>(33, 1.0)), a), DomainError);
}
