#include <algorithm>
#include <cmath>

#include "fracdiff/diagnostics.hpp"

namespace fracdiff::diagnostics {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }

double psi_with(double t, double x, double ex, double et) {
    return pos(std::pow(std::abs(x), ex) - 1.0) + pos(std::pow(std::abs(t), et) - 1.0);
}

// Shifted profile ((|y| - r)^e - 1)_+ for |y| >= r, 0 otherwise.
double shifted(double y, double r, double e) {
    const double ay = std::abs(y);
    return ay >= r ? pos(std::pow(ay - r, e) - 1.0) : 0.0;
}

double psi_lambda(double t, double x, double lambda, double sigma, double alpha, double ex, double et) {
    return shifted(x, std::pow(lambda, -4.0 / sigma), ex) + shifted(t, std::pow(lambda, -4.0 / alpha), et);
}

double F1(double x) { return std::max(-1.0, std::min(0.0, x * x - 9.0)); }
double F2(double t) { return std::max(-1.0, std::min(0.0, t * t - 16.0)); }

void require_nonpositive_time(double t) {
    if (t > 0.0) throw DomainError("barrier_eval: the psi family is only defined for t <= 0");
}

}  // namespace

double barrier_eval(const BarrierFamily& family, double t, double x) {
    const BarrierParams& p = family.params;
    switch (family.kind) {
        case BarrierKind::Psi:
            require_nonpositive_time(t);
            return psi_with(t, x, p.sigma / 2.0, p.alpha / 2.0);
        case BarrierKind::PsiL:
            require_nonpositive_time(t);
            return p.level + psi_with(t, x, p.sigma / 2.0, p.alpha / 2.0);
        case BarrierKind::PsiBar:
            require_nonpositive_time(t);
            return psi_with(t, x, p.sigma / 4.0, p.alpha / 4.0);
        case BarrierKind::PsiLambda:
            require_nonpositive_time(t);
            if (!(p.lambda > 0.0 && p.lambda < 1.0 / 3.0))
                throw DomainError("barrier_eval: psi_lambda needs 0 < lambda < 1/3");
            return psi_lambda(t, x, p.lambda, p.sigma, p.alpha, p.sigma / 4.0, p.alpha / 4.0);
        case BarrierKind::PsiTauLambda:
            require_nonpositive_time(t);
            if (!(p.lambda > 0.0 && p.lambda < 1.0)) throw DomainError("barrier_eval: lambda must lie in (0,1)");
            if (!(p.tau > 0.0)) throw DomainError("barrier_eval: tau must be positive");
            return psi_lambda(t, x, p.lambda, p.sigma, p.alpha, p.tau, p.tau);
        case BarrierKind::Phi: {
            require_nonpositive_time(t);
            if (!(p.lambda > 0.0 && p.lambda < 1.0 / 3.0))
                throw DomainError("barrier_eval: phi_i needs 0 < lambda < 1/3");
            if (p.i < 0 || p.i > 4) throw DomainError("barrier_eval: phi_i index must be 0..4");
            const double l3 = p.lambda * p.lambda * p.lambda;
            const double li = std::pow(p.lambda, p.i);
            return 2.0 + psi_lambda(t, x, l3, p.sigma, p.alpha, p.sigma / 4.0, p.alpha / 4.0) + li * F1(x) +
                   li * F2(t);
        }
        case BarrierKind::F1: return F1(x);
        case BarrierKind::F2: return F2(t);
        case BarrierKind::Eta: {
            const double s = std::clamp(2.0 * (t - 0.5), 0.0, 1.0);
            return s * s * (3.0 - 2.0 * s);
        }
    }
    return 0.0;
}

InterpolationExponents interpolation_exponent(int n, FracOrder alpha, double sigma) {
    if (n < 1) throw DomainError("interpolation_exponent: n must be >= 1");
    if (!(sigma > 0.0 && sigma < 2.0)) throw DomainError("interpolation_exponent: sigma must lie in (0,2)");
    const double a = alpha.value(), an = a * n;
    return {2.0 * (an + sigma) / (an + (1.0 - a) * sigma), sigma / (an + sigma)};
}

}  // namespace fracdiff::diagnostics
