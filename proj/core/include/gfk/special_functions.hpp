#pragma once

namespace gfk::special {

/// Regularized incomplete gamma P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

/// Upper tail of the chi-squared distribution with `dof` degrees of freedom.
double chi2_survival(double x, double dof);

/// Upper tail of the F distribution with (d1, d2) degrees of freedom.
double f_survival(double f, double d1, double d2);

/// Student t CDF and inverse CDF.
double student_t_cdf(double t, double dof);
double student_t_quantile(double p, double dof);

inline constexpr double kNormal975 = 1.959963984540054;

}  // namespace gfk::special
