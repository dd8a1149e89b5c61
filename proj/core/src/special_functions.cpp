#include "sklab/special_functions.hpp"

#include <cmath>

#include "sklab/quadrature.hpp"

namespace sklab::sf {

namespace {

double lgamma_checked(double x) { return std::lgamma(x); }

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

double log_unit_ball_volume(int n) {
    if (n < 1) throw std::domain_error("unit_ball_volume: dimension must be >= 1");
    return 0.5 * n * std::log(M_PI) - lgamma_checked(0.5 * n + 1.0);
}

double unit_ball_volume(int n) { return std::exp(log_unit_ball_volume(n)); }

double unit_ball_volume_closed(int n) {
    if (n < 1) throw std::domain_error("unit_ball_volume: dimension must be >= 1");
    if (n % 2 == 0) {
        return std::pow(M_PI, n / 2.0) / factorial(n / 2);
    }
    // odd n: 2^n pi^((n-1)/2) ((n-1)/2)! / n!
    return std::pow(2.0, n) * std::pow(M_PI, (n - 1) / 2.0) * factorial((n - 1) / 2) / factorial(n);
}

double log_ball_ratio(int numerator_dim, int a, int b) {
    if (a + b != numerator_dim)
        throw std::invalid_argument("ball_ratio: factor dimensions must sum to numerator dimension");
    return log_unit_ball_volume(numerator_dim) - log_unit_ball_volume(a) - log_unit_ball_volume(b);
}

double ball_ratio(int numerator_dim, int a, int b) {
    return std::exp(log_ball_ratio(numerator_dim, a, b));
}

double log_beta_integral(double a, double b) {
    if (a < 0 || b < 0) throw std::domain_error("beta_integral: exponents must be >= 0");
    return lgamma_checked(a + 1.0) + lgamma_checked(b + 1.0) - lgamma_checked(a + b + 2.0);
}

double beta_integral(double a, double b) {
    const double log_gamma_route = log_beta_integral(a, b);

    // Quadrature route on the max-scaled integrand, so large exponents do not underflow.
    const double t_max = (a + b > 0) ? a / (a + b) : 0.5;
    double log_fmax = 0.0;
    if (t_max > 0 && t_max < 1) log_fmax = a * std::log(t_max) + b * std::log(1.0 - t_max);
    auto scaled = [&](double t) {
        if (t <= 0.0) return a == 0.0 ? std::exp(-log_fmax) : 0.0;
        if (t >= 1.0) return b == 0.0 ? std::exp(-log_fmax) : 0.0;
        return std::exp(a * std::log(t) + b * std::log(1.0 - t) - log_fmax);
    };
    // Split at the maximizer and a few widths around it (the bump narrows like 1/sqrt(a+b)).
    std::vector<double> brk = {t_max};
    const double w = 1.0 / std::sqrt(a + b + 4.0);
    for (int k : {1, 3, 8}) {
        brk.push_back(t_max - k * w);
        brk.push_back(t_max + k * w);
    }
    auto q = quad::integrate_split(scaled, 0.0, 1.0, brk, 1e-14, 1e-13);
    const double log_quad_route = log_fmax + std::log(q.value);

    if (std::abs(log_quad_route - log_gamma_route) > 1e-10)
        throw std::runtime_error("beta_integral: quadrature and Gamma routes disagree beyond 1e-10");
    return std::exp(log_gamma_route);
}

std::pair<double, double> beta_integral_exponents(double dim, double r, Direction direction) {
    if (dim <= 0) throw std::domain_error("beta exponents: dimension must be positive");
    if (direction == Direction::expansion) {
        if (r <= 1.0) throw std::domain_error("beta_sup_bound: expansion requires r > 1");
        return {dim / (2.0 * r) * (r - 1.0), dim / (2.0 * r)};
    }
    if (r <= 0.0 || r >= 1.0) throw std::domain_error("beta_sup_bound: reduction requires 0 < r < 1");
    return {0.5 * dim * (1.0 - r), 0.5 * dim * r};
}

double log_beta_sup_bound(double dim, double r, Direction direction) {
    auto [a, b] = beta_integral_exponents(dim, r, direction);
    const double t_max = a / (a + b);  // = 1 - 1/r (expansion), 1 - r (reduction)
    return a * std::log(t_max) + b * std::log(1.0 - t_max);
}

double beta_sup_bound(double dim, double r, Direction direction) {
    return std::exp(log_beta_sup_bound(dim, r, direction));
}

double noise_norm_mode(int n_dim, double sigma_n) {
    return sigma_n * std::sqrt((n_dim - 1.0) / n_dim);
}

double noise_norm_pdf(double rho, int n_dim, double sigma_n) {
    if (n_dim < 2) throw std::domain_error("noise_norm_pdf: stated for N >= 2");
    if (sigma_n <= 0) throw std::domain_error("noise_norm_pdf: sigma_n must be positive");
    if (rho < 0) throw std::domain_error("noise_norm_pdf: rho must be >= 0");
    if (rho == 0.0) return 0.0;
    const double half_n = 0.5 * n_dim;
    const double log_pdf = std::log(2.0) + half_n * std::log(half_n) + (n_dim - 1.0) * std::log(rho)
                         - lgamma_checked(half_n) - n_dim * std::log(sigma_n)
                         - half_n * rho * rho / (sigma_n * sigma_n);
    return std::exp(log_pdf);
}

double noise_norm_cdf(double rho, int n_dim, double sigma_n) {
    if (n_dim < 2) throw std::domain_error("noise_norm_cdf: stated for N >= 2");
    if (rho <= 0.0) return 0.0;
    const double mode = noise_norm_mode(n_dim, sigma_n);
    const double width = sigma_n / std::sqrt(2.0 * n_dim);
    std::vector<double> brk;
    for (int k : {-8, -3, -1, 0, 1, 3, 8}) brk.push_back(mode + k * width);
    auto pdf = [=](double r) { return noise_norm_pdf(r, n_dim, sigma_n); };
    auto q = quad::integrate_split(pdf, 0.0, rho, brk, 1e-13, 1e-12);
    return std::min(1.0, q.value);
}

double noise_norm_quantile(double p, int n_dim, double sigma_n) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("noise_norm_quantile: p must be in (0, 1)");
    if (n_dim < 2) throw std::domain_error("noise_norm_quantile: stated for N >= 2");

    const double mode = noise_norm_mode(n_dim, sigma_n);
    const double width = sigma_n / std::sqrt(2.0 * n_dim);
    double lo = 0.0;
    double hi = mode + 12.0 * width;
    while (noise_norm_cdf(hi, n_dim, sigma_n) < p) hi *= 2.0;

    // Bisection to a tight bracket, then Newton on the cdf.
    while (hi - lo > 1e-6 * sigma_n) {
        const double mid = 0.5 * (lo + hi);
        (noise_norm_cdf(mid, n_dim, sigma_n) < p ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
        const double err = noise_norm_cdf(x, n_dim, sigma_n) - p;
        if (std::abs(err) <= 1e-9) break;
        const double d = noise_norm_pdf(x, n_dim, sigma_n);
        if (d <= 0.0) break;
        double step = err / d;
        // Stay inside the bracket.
        double nx = x - step;
        if (nx <= lo || nx >= hi) nx = 0.5 * (lo + hi);
        (noise_norm_cdf(nx, n_dim, sigma_n) < p ? lo : hi) = nx;
        x = nx;
    }
    return x;
}

}  // namespace sklab::sf
