#include "xm/stats_util.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "xm/errors.hpp"

namespace xm {

double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double standard_error(std::span<const double> v) {
    if (v.empty()) return 0.0;
    return sample_std(v) / std::sqrt(static_cast<double>(v.size()));
}

namespace {

double beta_cont_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-15;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double reg_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("reg_incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cont_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_cont_fraction(b, a, 1.0 - x) / b;
}

double reg_lower_gamma(double s, double x) {
    if (!(s > 0.0)) throw std::invalid_argument("reg_lower_gamma: s must be positive");
    if (x <= 0.0) return 0.0;
    if (x < s + 1.0) {
        // series expansion
        double term = 1.0 / s;
        double sum = term;
        double ap = s;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    // continued fraction for the upper tail
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    const double upper = std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
    return 1.0 - upper;
}

double welch_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw ConfigError("welch_t: both samples need at least 2 values");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = mean(a);
    const double mb = mean(b);
    const double sa = sample_std(a);
    const double sb = sample_std(b);
    const double va = sa * sa / na;
    const double vb = sb * sb / nb;
    if (va + vb == 0.0) return ma == mb ? 1.0 : 0.0;
    const double t = (ma - mb) / std::sqrt(va + vb);
    const double df = (va + vb) * (va + vb) /
                      (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    // two-sided survival of |t| under Student's t with df degrees of freedom
    const double x = df / (df + t * t);
    return reg_incomplete_beta(df / 2.0, 0.5, x);
}

double chi_square_pvalue(double statistic, int df) {
    if (df <= 0) throw std::invalid_argument("chi_square_pvalue: df must be positive");
    if (statistic <= 0.0) return 1.0;
    return 1.0 - reg_lower_gamma(df / 2.0, statistic / 2.0);
}

}  // namespace xm
