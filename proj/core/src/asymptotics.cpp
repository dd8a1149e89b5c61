#include "sklab/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "sklab/special_functions.hpp"

namespace sklab::asym {

namespace {

// Source dimension M = N/r, rejecting non-integral ratios.
int source_dim_of(int channel_dim, double r) {
    const double m = channel_dim / r;
    const int mi = static_cast<int>(std::lround(m));
    if (mi < 1 || std::abs(mi * r - channel_dim) > 1e-9 * channel_dim)
        throw std::invalid_argument("asymptotics: N/r must be a positive integer");
    return mi;
}

void finish(AsymptoticPrediction& p, double sigma_x2) {
    p.sdr_db = db(sigma_x2 / p.d_total);
    p.opta_sdr_db = db(opta_sdr(p.csnr, p.r));
    p.gap_db = p.sdr_db - p.opta_sdr_db;
}

// Quantile of the norm of an n-dimensional N(0, sigma^2 I) vector; the shared
// pdf machinery needs n >= 2, so fold the one-dimensional case by hand.
double norm_quantile(double p, int n_dim, double sigma) {
    if (n_dim >= 2) return sf::noise_norm_quantile(p, n_dim, sigma);
    double lo = 0.0, hi = 10.0 * sigma;
    while (std::erf(hi / (sigma * std::sqrt(2.0))) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::erf(mid / (sigma * std::sqrt(2.0))) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double opta_sdr(double csnr, double r) {
    if (csnr <= 0 || r <= 0) throw std::invalid_argument("opta_sdr: csnr and r must be positive");
    return std::pow(1.0 + csnr, r);
}

double max_curve_length(int channel_dim, double power_per_dim, double sigma_n) {
    const int n = channel_dim;
    if (n < 2) throw std::invalid_argument("max_curve_length: N >= 2 required");
    if (power_per_dim <= 0 || sigma_n <= 0)
        throw std::invalid_argument("max_curve_length: power and sigma_n must be positive");
    const double log_l = sf::log_unit_ball_volume(n) - sf::log_unit_ball_volume(n - 1) +
                         std::log(sigma_n) - 0.5 * (n - 1) * std::log1p(-1.0 / n) +
                         0.5 * n * std::log1p(power_per_dim / (sigma_n * sigma_n));
    return std::exp(log_l);
}

double expansion_radius_bound(int source_dim, int channel_dim, double power_per_dim,
                              double sigma_n) {
    const int m = source_dim, n = channel_dim;
    if (m < 1 || m >= n) throw std::invalid_argument("expansion_radius_bound: 1 <= M < N required");
    if (power_per_dim <= 0 || sigma_n <= 0)
        throw std::invalid_argument("expansion_radius_bound: power and sigma_n must be positive");
    const double log_rho = sf::log_ball_ratio(n, m, n - m) / m + std::log(sigma_n) -
                           (n - m) / (2.0 * m) * std::log1p(-static_cast<double>(m) / n) +
                           n / (2.0 * m) * std::log1p(power_per_dim / (sigma_n * sigma_n));
    return std::exp(log_rho);
}

AsymptoticPrediction expansion_distortion_asymptotic(int channel_dim, double r, double csnr) {
    if (r < 1.0) throw std::invalid_argument("expansion_distortion_asymptotic: r >= 1 required");
    if (csnr <= 0) throw std::invalid_argument("expansion_distortion_asymptotic: csnr > 0 required");
    AsymptoticPrediction p;
    p.channel_dim = channel_dim;
    p.source_dim = source_dim_of(channel_dim, r);
    p.r = r;
    p.csnr = csnr;
    if (p.source_dim == p.channel_dim) {
        p.d_total = 1.0 / (1.0 + csnr);
        finish(p, 1.0);
        return p;
    }
    const int n = channel_dim, m = p.source_dim;
    const auto [et, e1] = sf::beta_integral_exponents(n, r, Direction::expansion);
    p.log_beta_integral = sf::log_beta_integral(et, e1);
    p.log_ball_ratio = sf::log_ball_ratio(n, m, n - m);
    p.radius_bound = expansion_radius_bound(m, n, csnr, 1.0);
    const double log_d = -std::log(r) + (r - 1.0) * std::log1p(-1.0 / r) -
                         2.0 * r / n * (std::log(0.5 * n + 1.0) + p.log_beta_integral) -
                         r * std::log1p(csnr);
    p.d_total = std::exp(log_d);
    finish(p, 1.0);
    return p;
}

AsymptoticPrediction expansion_distortion_finite(int channel_dim, double r, double csnr,
                                                 double p_anomaly) {
    if (!(p_anomaly > 0.0 && p_anomaly < 1.0))
        throw std::invalid_argument("expansion_distortion_finite: p_anomaly in (0,1) required");
    AsymptoticPrediction p = expansion_distortion_asymptotic(channel_dim, r, csnr);
    if (p.source_dim == p.channel_dim) return p;
    const int n = p.channel_dim, m = p.source_dim;
    // Shell radii at the (1 - p) norm quantile instead of their N -> inf
    // limits; excess over sigma_n^2 = 1 widens both the tangential noise shell
    // and the received-signal sphere.
    const double q_mn = norm_quantile(1.0 - p_anomaly, n - m, 1.0);
    const double q_n = norm_quantile(1.0 - p_anomaly, n, 1.0);
    p.delta_mn2 = std::max(0.0, q_mn * q_mn - 1.0);
    p.delta_n2 = std::max(0.0, q_n * q_n - 1.0);
    const double log_d = -std::log(r) + (r - 1.0) * std::log1p(-1.0 / r) -
                         2.0 * r / n * (std::log(0.5 * n + 1.0) + p.log_beta_integral) +
                         (r - 1.0) * std::log1p(p.delta_mn2) -
                         r * std::log(csnr + 1.0 + p.delta_n2);
    p.d_total = std::exp(log_d);
    finish(p, 1.0);
    return p;
}

double reduction_delta_opt(int source_dim, int channel_dim, double sigma_x, double csnr) {
    const int m = source_dim, n = channel_dim;
    if (n >= m || n < 1) throw std::invalid_argument("reduction_delta_opt: N < M required");
    if (sigma_x <= 0 || csnr <= 0)
        throw std::invalid_argument("reduction_delta_opt: sigma_x and csnr must be positive");
    const double mn = m - n;
    const double log_btilde = sf::log_ball_ratio(m, n, m - n);
    const double log_d = mn / (2.0 * m) * std::log(m) +
                         n / (2.0 * m) * std::log(4.0 * m * (mn + 2.0) / mn) +
                         n / (2.0 * m) * std::log(mn / n) +
                         (1.0 - static_cast<double>(n) / m) * std::log(2.0) + log_btilde / m +
                         std::log(sigma_x) - n / (2.0 * m) * std::log1p(csnr);
    return std::exp(log_d);
}

AsymptoticPrediction reduction_distortion(int source_dim, int channel_dim, double sigma_x,
                                          double csnr) {
    const int m = source_dim, n = channel_dim;
    if (n >= m || n < 1) throw std::invalid_argument("reduction_distortion: N < M required");
    if (sigma_x <= 0 || csnr <= 0)
        throw std::invalid_argument("reduction_distortion: sigma_x and csnr must be positive");
    AsymptoticPrediction p;
    p.source_dim = m;
    p.channel_dim = n;
    p.r = static_cast<double>(n) / m;
    p.csnr = csnr;
    const double mn = m - n;
    p.log_ball_ratio = sf::log_ball_ratio(m, n, m - n);
    p.log_beta_integral = sf::log_beta_integral(0.5 * mn, 0.5 * n);
    p.radius_bound = reduction_delta_opt(m, n, sigma_x, csnr);
    const double rn = static_cast<double>(n) / m;
    const double log_d = std::log1p(n / mn) + (1.0 - rn) * std::log(mn / (mn + 2.0)) +
                         rn * std::log(mn / n) +
                         2.0 / m * (std::log(0.5 * m + 1.0) + p.log_beta_integral) +
                         2.0 * std::log(sigma_x) - rn * std::log1p(csnr);
    p.d_total = std::exp(log_d);
    // Minimum stretch for the fold structure to cover the source sphere,
    // evaluated at delta_opt with sigma_n = 1.
    const double log_alpha = 0.5 * m / n * std::log(m) - 0.5 * std::log(n) + p.log_ball_ratio / n -
                             mn / n * std::log(0.5 * p.radius_bound) +
                             static_cast<double>(m) / n * std::log(sigma_x) -
                             0.5 * std::log1p(csnr);
    p.alpha_bound = std::exp(log_alpha);
    finish(p, sigma_x * sigma_x);
    return p;
}

std::vector<std::pair<int, double>> opta_gap_curve(Direction direction, double r,
                                                   const std::vector<int>& dim_list, double csnr) {
    std::vector<std::pair<int, double>> out;
    out.reserve(dim_list.size());
    for (int dim : dim_list) {
        double gap;
        if (direction == Direction::expansion) {
            gap = expansion_distortion_asymptotic(dim, r, csnr).gap_db;
        } else {
            const int n = static_cast<int>(std::lround(dim * r));
            if (n < 1 || std::abs(n - dim * r) > 1e-9 * dim)
                throw std::invalid_argument("opta_gap_curve: M*r must be a positive integer");
            gap = n == dim ? 0.0 : reduction_distortion(dim, n, 1.0, csnr).gap_db;
        }
        out.emplace_back(dim, std::abs(gap));
    }
    return out;
}

}  // namespace sklab::asym
