#include "fracdiff/special.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fracdiff::special {

namespace {

constexpr int kMaxSeriesTerms = 200000;
constexpr long kMaxMpfrBits = 12000;
// Cap on terms x bits for the multiprecision sum (about a second of work).
constexpr double kMaxMpfrWork = 8e6;

// Smallest N with N + q >= 16, so the Euler-Maclaurin remainder is tiny.
long direct_terms(double q) { return std::max(0L, static_cast<long>(std::ceil(16.0 - q))); }

// B_{2p}/(2p)! for p = 1..5.
constexpr double kBernoulli[5] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0,
                                  1.0 / 47900160.0};

// Euler-Maclaurin remainder of sum_{m>=0} (m+X)^{-s}, excluding the leading
// integral term X^{1-s}/(s-1) which callers handle themselves.
double em_correction(double s, double X) {
    double r = 0.5 * std::pow(X, -s);
    double rising = s;               // (s)_{2p-1}
    double xp = std::pow(X, -s - 1);  // X^{-s-2p+1}
    for (int p = 0; p < 5; ++p) {
        r += kBernoulli[p] * rising * xp;
        rising *= (s + 2 * p + 1) * (s + 2 * p + 2);
        xp /= X * X;
    }
    return r;
}

// (X1^{1-s} - X2^{1-s}) / (s-1), stable as s -> 1.
double leading_difference(double s, double X1, double X2) {
    const double e = 1.0 - s;
    const double lr = std::log(X1 / X2);
    if (std::abs(e * lr) < 1e-300) return -lr;
    return -std::pow(X2, e) * std::expm1(e * lr) / e;
}

}  // namespace

double hurwitz_zeta(double s, double q) {
    if (!(s > 1.0) || !(q > 0.0)) throw DomainError("hurwitz_zeta requires s > 1 and q > 0");
    const long N = direct_terms(q);
    double sum = 0.0;
    for (long m = N - 1; m >= 0; --m) sum += std::pow(static_cast<double>(m) + q, -s);
    const double X = static_cast<double>(N) + q;
    return sum + std::pow(X, 1.0 - s) / (s - 1.0) + em_correction(s, X);
}

double power_sum_difference(double s, double q1, double q2) {
    if (!(s > 0.0) || !(q1 > 0.0) || !(q2 > 0.0))
        throw DomainError("power_sum_difference requires s > 0 and q1, q2 > 0");
    const long N = direct_terms(std::min(q1, q2));
    double sum = 0.0;
    for (long m = N - 1; m >= 0; --m) {
        const double mm = static_cast<double>(m);
        sum += std::pow(mm + q1, -s) - std::pow(mm + q2, -s);
    }
    const double X1 = static_cast<double>(N) + q1, X2 = static_cast<double>(N) + q2;
    return sum + leading_difference(s, X1, X2) + em_correction(s, X1) - em_correction(s, X2);
}

namespace {

struct SeriesPlan {
    int terms = 0;      // terms to sum (m = 0..terms-1)
    double peak = 0.0;  // log10 of the largest term magnitude
};

SeriesPlan plan_series(double alpha, double x) {
    SeriesPlan plan;
    const double lx = std::log10(x);
    bool past_peak = false;
    double prev = 0.0;
    for (int m = 0;; ++m) {
        const double lt = m * lx - std::lgamma(alpha * m + 1.0) / std::log(10.0);
        plan.peak = std::max(plan.peak, lt);
        if (m > 0 && lt < prev) past_peak = true;
        prev = lt;
        if (past_peak && lt < plan.peak - 40.0 && lt < -22.0) {
            plan.terms = m;
            return plan;
        }
        if (m >= kMaxSeriesTerms) {
            plan.terms = -1;
            return plan;
        }
    }
}

MLResult sum_in_double(double alpha, double z, const SeriesPlan& plan) {
    double sum = 0.0, maxterm = 0.0, zp = 1.0;
    for (int m = 0; m < plan.terms; ++m) {
        const double term = zp / std::tgamma(alpha * m + 1.0);
        sum += term;
        maxterm = std::max(maxterm, std::abs(term));
        zp *= z;
    }
    const double next = std::abs(zp / std::tgamma(alpha * plan.terms + 1.0));
    const double rounding = 4.0 * plan.terms * std::numeric_limits<double>::epsilon() * maxterm;
    return {sum, plan.terms, next + rounding};
}

MLResult sum_in_mpfr(double alpha, double z, const SeriesPlan& plan) {
    // Enough bits to keep ~25 significant digits after cancelling the peak.
    const long bits = static_cast<long>(std::ceil((plan.peak + 25.0) * 3.3219280948873623)) + 16;
    if (bits > kMaxMpfrBits || static_cast<double>(bits) * plan.terms > kMaxMpfrWork) {
        std::ostringstream os;
        os << "mittag_leffler: series needs " << plan.terms << " terms at " << bits << " bits at alpha=" << alpha
           << ", z=" << z << " (outside the series regime)";
        throw RegimeError(os.str());
    }
    mpfr_t sum, term, zp, g, tmp;
    mpfr_inits2(bits, sum, term, zp, g, tmp, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_ui(sum, 0, MPFR_RNDN);
    mpfr_set_ui(zp, 1, MPFR_RNDN);
    for (int m = 0; m < plan.terms; ++m) {
        mpfr_set_d(tmp, alpha, MPFR_RNDN);
        mpfr_mul_ui(tmp, tmp, static_cast<unsigned long>(m), MPFR_RNDN);
        mpfr_add_ui(tmp, tmp, 1, MPFR_RNDN);
        mpfr_gamma(g, tmp, MPFR_RNDN);
        mpfr_div(term, zp, g, MPFR_RNDN);
        mpfr_add(sum, sum, term, MPFR_RNDN);
        mpfr_mul_d(zp, zp, z, MPFR_RNDN);
    }
    mpfr_set_d(tmp, alpha * plan.terms + 1.0, MPFR_RNDN);
    mpfr_gamma(g, tmp, MPFR_RNDN);
    mpfr_div(term, zp, g, MPFR_RNDN);
    const double next = std::abs(mpfr_get_d(term, MPFR_RNDN));
    const double value = mpfr_get_d(sum, MPFR_RNDN);
    mpfr_clears(sum, term, zp, g, tmp, static_cast<mpfr_ptr>(nullptr));
    // Rounding of the accumulated terms plus the final conversion to double.
    const double rounding = plan.terms * std::pow(10.0, plan.peak - (bits - 16) / 3.3219280948873623) +
                            std::abs(value) * std::numeric_limits<double>::epsilon();
    return {value, plan.terms, next + rounding};
}

}  // namespace

MLResult mittag_leffler(FracOrder alpha, double z) {
    if (!std::isfinite(z) || z > 0.0) throw DomainError("mittag_leffler: requires finite z <= 0");
    if (-z > kMittagLefflerMaxAbsZ) {
        std::ostringstream os;
        os << "mittag_leffler: |z| = " << -z << " exceeds the series regime (|z| <= 30)";
        throw RegimeError(os.str());
    }
    if (z == 0.0) return {1.0, 1, 0.0};
    const SeriesPlan plan = plan_series(alpha, -z);
    if (plan.terms < 0) throw RegimeError("mittag_leffler: series does not settle within the term budget");
    if (plan.peak < 2.0) {
        MLResult r = sum_in_double(alpha, z, plan);
        if (r.error_bound <= 1e-12) return r;
    }
    return sum_in_mpfr(alpha, z, plan);
}

std::vector<double> eigenmode_reference(FracOrder alpha, double mu, double a,
                                        std::span<const double> times) {
    if (mu < 0.0) throw DomainError("eigenmode_reference: mu must be >= 0");
    const double rate = mu / std::tgamma(1.0 - alpha);
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        if (t < a) throw DomainError("eigenmode_reference: time before the initial point");
        out.push_back(mittag_leffler(alpha, -rate * std::pow(t - a, alpha.value())).value);
    }
    return out;
}

}  // namespace fracdiff::special
