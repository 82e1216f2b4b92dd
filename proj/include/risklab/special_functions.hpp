#pragma once

namespace risklab {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation (Lentz), accurate to well under 1e-10 absolute.
double reg_incomplete_beta(double a, double b, double x);

// Two-tailed tail probability of Student's t with df degrees of freedom.
double student_t_two_tailed(double t, double df);

// P(F >= f) for an F distribution with (df1, df2) degrees of freedom.
double f_tail(double f, double df1, double df2);

}  // namespace risklab
