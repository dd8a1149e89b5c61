#pragma once

#include <utility>
#include <vector>

#include "sklab/types.hpp"

namespace sklab::asym {

/// Closed-form distortion prediction for an optimal M:N mapping, with the
/// intermediate quantities that enter it.
struct AsymptoticPrediction {
    int source_dim = 0;   // M
    int channel_dim = 0;  // N
    double r = 0.0;       // N / M
    double csnr = 0.0;
    double d_total = 0.0; // per-dimension MSE, unit source variance unless noted
    double sdr_db = 0.0;
    double opta_sdr_db = 0.0;
    double gap_db = 0.0;  // sdr_db - opta_sdr_db (signed; the sphere-hardening
                          // expansion asymptote may sit above OPTA at small N)

    // Intermediates, populated where they apply.
    double log_ball_ratio = 0.0;
    double log_beta_integral = 0.0;
    double radius_bound = 0.0;  // expansion: rho_M; reduction: delta_opt
    double delta_mn2 = 0.0;     // finite-N norm excess, (N-M)-dim noise component
    double delta_n2 = 0.0;      // finite-N norm excess, N-dim received component
    double alpha_bound = 0.0;   // reduction: minimum stretch at delta_opt
};

/// Optimum performance theoretically attainable: SDR = (1 + CSNR)^r.
double opta_sdr(double csnr, double r);

/// Maximum length of a signal curve inside the N-dimensional channel sphere
/// under per-dimension power P_N with anomalous errors avoided:
/// L <= (B_N / B_{N-1}) sigma_n (1 - 1/N)^{-(N-1)/2} (1 + P_N/sigma_n^2)^{N/2}.
double max_curve_length(int channel_dim, double power_per_dim, double sigma_n);

/// Largest radius of an M-ball signal surface in an N-dimensional channel
/// sphere (shape-preserving covering bound), computed in log-space:
/// rho_M <= Btilde^{1/M} sigma_n (1 - M/N)^{-(N-M)/(2M)} (1 + P/sigma_n^2)^{N/(2M)}.
/// M = 1 reduces to max_curve_length / 2.
double expansion_radius_bound(int source_dim, int channel_dim, double power_per_dim,
                              double sigma_n);

/// Sphere-hardening distortion of an optimal M:N expansion, r = N/M >= 1:
/// D_t = (1/r)(1 - 1/r)^{r-1} (N/2 + 1)^{-2r/N} B_{(N,r)}^{-2r/N} (1 + csnr)^{-r}.
/// r = 1 is exactly OPTA. N/r must be integral.
AsymptoticPrediction expansion_distortion_asymptotic(int channel_dim, double r, double csnr);

/// Finite-N refinement: the noise-norm and received-norm shell radii are taken
/// at the (1 - p_anomaly) quantile instead of their infinite-dimension limits,
/// which keeps the prediction on the achievable side of OPTA.
AsymptoticPrediction expansion_distortion_finite(int channel_dim, double r, double csnr,
                                                 double p_anomaly);

/// Fold spacing minimizing approximation + channel distortion of an M:N
/// reduction surface (log-space evaluation).
double reduction_delta_opt(int source_dim, int channel_dim, double sigma_x, double csnr);

/// Total distortion of an optimal M:N reduction at its optimal fold spacing,
/// including the minimum stretch alpha_bound the covering requires.
AsymptoticPrediction reduction_distortion(int source_dim, int channel_dim, double sigma_x,
                                          double csnr);

/// |SDR - OPTA| in dB versus dimension. The list holds the growing dimension:
/// the channel dimension N for expansion (r >= 1), the source dimension M for
/// reduction (r < 1). Unit source variance.
std::vector<std::pair<int, double>> opta_gap_curve(Direction direction, double r,
                                                   const std::vector<int>& dim_list, double csnr);

}  // namespace sklab::asym
