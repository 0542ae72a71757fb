#pragma once

#include <span>

namespace xm {

double mean(std::span<const double> v);
// Sample standard deviation (n-1 denominator); 0 for fewer than 2 values.
double sample_std(std::span<const double> v);
// sample_std / sqrt(n).
double standard_error(std::span<const double> v);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double reg_incomplete_beta(double a, double b, double x);
// Regularized lower incomplete gamma P(s, x).
double reg_lower_gamma(double s, double x);

// Two-sided Welch unequal-variance t-test p-value with Welch-Satterthwaite
// degrees of freedom. Degenerate zero-variance inputs: p = 1 when the means
// are equal, p = 0 otherwise.
double welch_t(std::span<const double> a, std::span<const double> b);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi_square_pvalue(double statistic, int df);

}  // namespace xm
