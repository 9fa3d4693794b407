#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fracdiff/errors.hpp"
#include "fracdiff/spaceop.hpp"

using namespace fracdiff;
using namespace fracdiff::spaceop;

namespace {

KernelSpec make_kernel(KernelMode mode, double sigma = 1.0, double L = 8.0) {
    KernelSpec k;
    k.mode = mode;
    k.sigma = sigma;
    k.period = L;
    return k;
}

std::vector<double> random_field(std::mt19937_64& gen, long n) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = U(gen);
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TEST_CASE("space grid validation") {
    CHECK_THROWS_AS(SpaceGrid(7.9, 64), DomainError);
    CHECK_THROWS_AS(SpaceGrid(8.0, 7), DomainError);
    const SpaceGrid g(8.0, 32);
    CHECK(g.h() == 0.25);
    CHECK(g.n() == 1);
    CHECK(g.node(3) == 0.75);
}

TEST_CASE("kernel values") {
    const auto trunc = make_kernel(KernelMode::TruncatedFractional);
    CHECK(kernel_eval(trunc, 0.0, 0.0, 4.0) == 0.0);
    CHECK(kernel_eval(trunc, 0.0, 1.0, 3.0) == doctest::Approx(0.25).epsilon(1e-15));

    // sum_n |2 + 8n|^{-2} = (trigamma(1/4) + trigamma(3/4)) / 64
    const auto full = make_kernel(KernelMode::FullFractional);
    const double images = (boost::math::trigamma(0.25) + boost::math::trigamma(0.75)) / 64.0;
    const double K = kernel_eval(full, 0.0, 0.0, 2.0);
    CHECK(K == doctest::Approx(images).epsilon(1e-12));
    CHECK(K > 0.25);
    CHECK(kernel_eval(full, 0.0, 7.0, 1.0) == K);  // minimal image distance 2

    CHECK_THROWS_AS(kernel_eval(full, 0.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(kernel_eval(full, 0.0, 1.0, 9.0), DomainError);
}

TEST_CASE("kernels are symmetric") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> U(0.0, 8.0);
    for (auto mode : {KernelMode::TruncatedFractional, KernelMode::FullFractional}) {
        const auto k = make_kernel(mode, 0.7);
        for (int i = 0; i < 100; ++i) {
            const double x = U(gen), y = U(gen), t = U(gen);
            CHECK(kernel_eval(k, t, x, y) == kernel_eval(k, t, y, x));
        }
    }
}

TEST_CASE("ellipticity check") {
    auto trunc = make_kernel(KernelMode::TruncatedFractional);
    CHECK(ellipticity_check(trunc, 2000).violations.empty());
    CHECK(ellipticity_check(make_kernel(KernelMode::FullFractional, 1.4), 2000).violations.empty());

    KernelSpec tab = make_kernel(KernelMode::Tabulated);
    tab.table.distances = {0.5, 1.0, 2.0, 3.0};
    tab.table.factors = {1.0, 1.0, 10.0, 1.0};
    const auto rep = ellipticity_check(tab, 2000);
    CHECK(!rep.violations.empty());
    CHECK(rep.max_ratio > 5.0);

    trunc.Lambda = 2.0;
    trunc.multiplier.value = 1.5;
    CHECK(ellipticity_check(trunc, 2000).violations.empty());
    trunc.multiplier.value = 3.0;
    CHECK(!ellipticity_check(trunc, 2000).violations.empty());

    trunc.multiplier = {};
    trunc.multiplier.kind = TimeMultiplier::Kind::Sinusoid;
    trunc.multiplier.value = 1.0;
    trunc.multiplier.amplitude = 0.4;
    trunc.multiplier.omega = 2.0;
    const auto sin_rep = ellipticity_check(trunc, 2000);
    CHECK(sin_rep.violations.empty());
    CHECK(sin_rep.max_ratio > 1.3);

    CHECK_THROWS_AS(ellipticity_check(trunc, 0), DomainError);
}

TEST_CASE("kernel spec validation") {
    auto k = make_kernel(KernelMode::FullFractional);
    k.sigma = 2.0;
    CHECK_THROWS_AS(k.validate(), DomainError);
    k = make_kernel(KernelMode::FullFractional);
    k.Lambda = 0.5;
    CHECK_THROWS_AS(k.validate(), DomainError);
    k = make_kernel(KernelMode::FullFractional);
    k.multiplier.kind = TimeMultiplier::Kind::Sinusoid;
    k.multiplier.amplitude = 1.0;
    CHECK_THROWS_AS(k.validate(), DomainError);
    k = make_kernel(KernelMode::Tabulated);
    k.table.distances = {1.0, 0.5};
    k.table.factors = {1.0, 1.0};
    CHECK_THROWS_AS(k.validate(), DomainError);
    CHECK(kernel_mode_from_string(to_string(KernelMode::Tabulated)) == KernelMode::Tabulated);
    CHECK_THROWS_AS(kernel_mode_from_string("gaussian"), DomainError);
    CHECK_THROWS_AS(assemble(make_kernel(KernelMode::FullFractional, 1.0, 16.0), SpaceGrid(8.0, 16), 0.0), DomainError);
}

TEST_CASE("cell weights match the closed form and direct quadrature") {
    const SpaceGrid g(8.0, 8);
    const auto trunc = make_kernel(KernelMode::TruncatedFractional);
    const auto op = assemble(trunc, g, 0.0);
    CHECK(op.weights()(0, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

    using boost::math::quadrature::gauss_kronrod;
    for (auto mode : {KernelMode::TruncatedFractional, KernelMode::FullFractional})
        for (double sigma : {0.5, 1.0, 1.5}) {
            const auto k = make_kernel(mode, sigma);
            const SpaceGrid grid(8.0, 16);
            const auto W = assemble(k, grid, 0.0).weights();
            for (long o : {1L, 3L, 5L, 8L, 13L}) {
                const double lo = (static_cast<double>(o) - 0.5) * grid.h(), hi = lo + grid.h();
                // Split at the truncation radius so the integrand is smooth on each piece.
                double q = 0.0;
                const auto f = [&](double y) { return kernel_eval(k, 0.0, 0.0, y); };
                const double r1 = 3.0, r2 = 8.0 - 3.0;
                std::vector<double> cuts{lo};
                for (double c : {r1, r2})
                    if (c > lo && c < hi) cuts.push_back(c);
                cuts.push_back(hi);
                for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
                    q += gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 12, 1e-13);
                CAPTURE(o);
                CAPTURE(sigma);
                CHECK(W(0, o) == doctest::Approx(q).epsilon(1e-10));
            }
        }

    KernelSpec tab = make_kernel(KernelMode::Tabulated);
    tab.table.distances = {0.5, 3.0};
    tab.table.factors = {1.0, 1.0};
    const auto Wt = assemble(tab, SpaceGrid(8.0, 16), 0.0).weights();
    const auto Wp = assemble(make_kernel(KernelMode::TruncatedFractional), SpaceGrid(8.0, 16), 0.0).weights();
    CHECK((Wt - Wp).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("assembled operators: symmetry, constants, sign structure") {
    for (auto mode : {KernelMode::TruncatedFractional, KernelMode::FullFractional})
        for (long N : {8L, 33L, 64L}) {
            const SpaceGrid g(8.0, N);
            const auto op = assemble(make_kernel(mode, 0.8), g, 0.0);
            const auto& W = op.weights();
            CHECK((W - W.transpose()).cwiseAbs().maxCoeff() == 0.0);
            CHECK(W.diagonal().cwiseAbs().maxCoeff() == 0.0);
            CHECK(W.minCoeff() >= 0.0);

            for (double c : {1.0, -3.5, 1e3}) {
                const auto r = spaceop::apply(op, std::vector<double>(static_cast<std::size_t>(N), c));
                for (double v : r) CHECK(std::abs(v) < 1e-12 * std::max(1.0, std::abs(c)));
            }

            std::vector<double> e(static_cast<std::size_t>(N), 0.0);
            e[5] = 1.0;
            const auto r = spaceop::apply(op, e);
            for (long m = 0; m < N; ++m) {
                if (m == 5) CHECK(r[5] < 0.0);
                else CHECK(r[static_cast<std::size_t>(m)] >= 0.0);
            }
        }
    CHECK_THROWS_AS(spaceop::apply(assemble(make_kernel(KernelMode::FullFractional), SpaceGrid(8.0, 16), 0.0), std::vector<double>(15)),
                    DomainError);
}

TEST_CASE("first Fourier mode is an eigenvector of the full operator") {
    const long N = 256;
    const SpaceGrid g(8.0, N);
    const auto op = assemble(make_kernel(KernelMode::FullFractional), g, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-op.dense());
    const auto& ev = es.eigenvalues();
    CHECK(std::abs(ev(0)) < 1e-9 * ev(N - 1));
    const double mu1 = ev(1);
    CHECK(ev(2) == doctest::Approx(mu1).epsilon(1e-10));  // cos and sin share it

    std::vector<double> phi(static_cast<std::size_t>(N));
    for (long m = 0; m < N; ++m) phi[static_cast<std::size_t>(m)] = std::cos(2.0 * std::numbers::pi * g.node(m) / g.L());
    const auto Aphi = spaceop::apply(op, phi);
    double res = 0.0, nrm = 0.0;
    for (std::size_t m = 0; m < phi.size(); ++m) {
        res = std::max(res, std::abs(Aphi[m] + mu1 * phi[m]));
        nrm = std::max(nrm, std::abs(mu1 * phi[m]));
    }
    CHECK(res < 0.01 * nrm);
}

TEST_CASE("negative operator is positive semidefinite with constant null vector") {
    for (auto mode : {KernelMode::TruncatedFractional, KernelMode::FullFractional}) {
        const long N = 64;
        const auto op = assemble(make_kernel(mode, 1.2), SpaceGrid(8.0, N), 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-op.dense());
        const auto& ev = es.eigenvalues();
        CHECK(std::abs(ev(0)) < 1e-10 * ev(N - 1));
        CHECK(ev(1) > 1e-8);
        const Eigen::VectorXd v0 = es.eigenvectors().col(0);
        CHECK((v0.array() - v0.mean()).abs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("bilinear form") {
    std::mt19937_64 gen(21);
    for (auto mode : {KernelMode::TruncatedFractional, KernelMode::FullFractional}) {
        const long N = 48;
        const auto op = assemble(make_kernel(mode, 0.6), SpaceGrid(8.0, N), 0.0);
        for (int i = 0; i < 100; ++i) {
            const auto u = random_field(gen, N), v = random_field(gen, N);
            CHECK(bilinear(op, u, u) >= 0.0);
            CHECK(std::abs(bilinear(op, u, std::vector<double>(static_cast<std::size_t>(N), 2.5))) < 1e-12);
            const double b = bilinear(op, u, v);
            CHECK(b == doctest::Approx(bilinear(op, v, u)).epsilon(1e-12));
            CHECK(std::abs(b + op.grid().h() * dot(spaceop::apply(op, u), v)) < 1e-10 * (1.0 + std::abs(b)));
        }
    }
    const auto op = assemble(make_kernel(KernelMode::FullFractional), SpaceGrid(8.0, 16), 0.0);
    CHECK_THROWS_AS(bilinear(op, std::vector<double>(16), std::vector<double>(8)), DomainError);
}

TEST_CASE("bilinear form by direct expansion on Nx = 8") {
    const auto op = assemble(make_kernel(KernelMode::FullFractional), SpaceGrid(8.0, 8), 0.0);
    const std::vector<double> u = {1, 0, 2, -1, 0.5, 3, -2, 0}, v = {0, 1, 1, 0, -1, 2, 0, 1};
    const auto& W = op.weights();
    double expect = 0.0;
    for (int m = 0; m < 8; ++m)
        for (int q = 0; q < 8; ++q) expect += 0.5 * op.grid().h() * W(m, q) * (u[m] - u[q]) * (v[m] - v[q]);
    CHECK(bilinear(op, u, v) == doctest::Approx(expect).epsilon(1e-14));
    double sbp = 0.0;
    for (int m = 0; m < 8; ++m) {
        double Au = 0.0;
        for (int q = 0; q < 8; ++q) Au += W(m, q) * (u[q] - u[m]);
        sbp -= op.grid().h() * Au * v[m];
    }
    CHECK(expect == doctest::Approx(sbp).epsilon(1e-13));
}

TEST_CASE("power-law homogeneity of assembled weights") {
    for (double sigma : {0.5, 1.0, 1.7}) {
        const double R = 2.0;
        const auto big = assemble(make_kernel(KernelMode::FullFractional, sigma, 16.0), SpaceGrid(16.0, 64), 0.0);
        const auto small = assemble(make_kernel(KernelMode::FullFractional, sigma, 8.0), SpaceGrid(8.0, 64), 0.0);
        const double scale = std::pow(R, sigma);
        CHECK(((small.weights() - scale * big.weights()).cwiseAbs().maxCoeff()) < 0.01 * small.weights().maxCoeff());
    }
}

TEST_CASE("time multiplier scales the assembled operator") {
    auto k = make_kernel(KernelMode::TruncatedFractional);
    k.multiplier.kind = TimeMultiplier::Kind::Sinusoid;
    k.multiplier.value = 1.0;
    k.multiplier.amplitude = 0.5;
    k.multiplier.omega = 3.0;
    const SpaceGrid g(8.0, 32);
    const double t = 0.4;
    const double m = 1.0 + 0.5 * std::sin(1.2);
    CHECK(k.multiplier(t) == doctest::Approx(m).epsilon(1e-15));
    const auto base = assemble(make_kernel(KernelMode::TruncatedFractional), g, 0.0);
    CHECK((assemble(k, g, t).weights() - m * base.weights()).cwiseAbs().maxCoeff() < 1e-13);

    k.multiplier.freeze_before = 0.0;
    CHECK(k.multiplier(-5.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("kernel rescaling") {
    const FracOrder a(0.5);
    const auto full = make_kernel(KernelMode::FullFractional, 1.0);
    const auto same = rescale_kernel(full, 1.0, 0.0, 0.0, a);
    for (double d : {0.3, 1.0, 2.5, 3.9})
        CHECK(kernel_eval(same, 0.7, 0.0, d) == kernel_eval(full, 0.7, 0.0, d));

    const auto twice = rescale_kernel(full, 2.0, 0.0, 0.0, a);
    for (double d : {0.3, 1.0, 2.5, 3.9, 6.0})
        CHECK(kernel_eval(twice, 0.0, 0.0, d) == doctest::Approx(kernel_eval(full, 0.0, 0.0, d / 2.0) * 0.25).epsilon(1e-12));

    for (double R : {1.0, 1.5, 2.0, 3.0}) {
        const auto r = rescale_kernel(make_kernel(KernelMode::TruncatedFractional, 0.8), R, 0.5, 1.0, a);
        CHECK(r.truncation_radius == doctest::Approx(3.0 * R));
        CHECK(ellipticity_check(r, 1000).violations.empty());
    }

    // Time argument: K_R(t) = K(t0 + t / R^{sigma / alpha}).
    auto sin_k = make_kernel(KernelMode::FullFractional);
    sin_k.multiplier.kind = TimeMultiplier::Kind::Sinusoid;
    sin_k.multiplier.amplitude = 0.3;
    sin_k.multiplier.omega = 1.7;
    const auto rs = rescale_kernel(sin_k, 2.0, -1.0, 0.0, a);
    CHECK(rs.multiplier(0.8) == doctest::Approx(sin_k.multiplier(-1.0 + 0.8 / 4.0)).epsilon(1e-14));

    CHECK_THROWS_AS(rescale_kernel(full, 0.5, 0.0, 0.0, a), DomainError);
}
