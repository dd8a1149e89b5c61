#pragma once

#include "sklab/types.hpp"

namespace sklab::sf {

/// Volume of the unit-radius ball bounded by an (n-1)-sphere:
/// B_n = pi^(n/2) / Gamma(n/2 + 1). Throws std::domain_error for n = 0.
double unit_ball_volume(int n);
double log_unit_ball_volume(int n);

/// Even/odd factorial closed forms of B_n (used as a cross-check of the Gamma form).
double unit_ball_volume_closed(int n);

/// B~ = B_n / (B_a * B_b) with a + b = n, evaluated in log space.
/// Equals Gamma(a/2+1) Gamma(b/2+1) / Gamma(n/2+1) and (n/2+1) * Beta(a/2+1, b/2+1).
double ball_ratio(int numerator_dim, int a, int b);
double log_ball_ratio(int numerator_dim, int a, int b);

/// int_0^1 t^a (1-t)^b dt for a, b >= 0. Evaluates both the Gamma quotient
/// Gamma(a+1)Gamma(b+1)/Gamma(a+b+2) and adaptive quadrature of the max-scaled
/// integrand, requires relative agreement 1e-10, and returns the Gamma route.
double beta_integral(double exp_t, double exp_1mt);
/// Gamma route only, in log space (the N ~ 1e4 regimes underflow the linear value).
double log_beta_integral(double exp_t, double exp_1mt);

/// Holder sup-norm bound on the Beta integral B_{(dim,r)}:
/// expansion (r > 1):  f(t) = t^{(dim/2r)(r-1)} (1-t)^{dim/2r},  t_max = 1 - 1/r;
/// reduction (0 < r < 1): f(t) = t^{(dim/2)(1-r)} (1-t)^{dim r/2}, t_max = 1 - r.
/// Always >= the corresponding beta_integral.
double beta_sup_bound(double dim, double r, Direction direction);
double log_beta_sup_bound(double dim, double r, Direction direction);

/// Exponents (exp_t, exp_1mt) of the Beta integrand B_{(dim,r)} for the given regime.
std::pair<double, double> beta_integral_exponents(double dim, double r, Direction direction);

/// pdf of the normalized noise norm rho = ||n||/sqrt(N) for i.i.d. Gaussian noise
/// with per-dimension std sigma_n:
///   f(rho) = 2 (N/2)^(N/2) rho^(N-1) / (Gamma(N/2) sigma_n^N) exp(-(N/2) rho^2 / sigma_n^2).
/// Stated for N >= 2; N < 2 is rejected.
double noise_norm_pdf(double rho, int n_dim, double sigma_n);

/// cdf of the normalized noise norm, by adaptive quadrature of the pdf
/// (split at the mode so the sharp large-N peak is resolved).
double noise_norm_cdf(double rho, int n_dim, double sigma_n);

/// Mode of the noise-norm pdf: sigma_n * sqrt((N-1)/N).
double noise_norm_mode(int n_dim, double sigma_n);

/// Quantile of the noise-norm distribution: the rho with cdf(rho) = p to
/// absolute 1e-9, by bisection (to 1e-6) then Newton polish.
double noise_norm_quantile(double p, int n_dim, double sigma_n);

}  // namespace sklab::sf
