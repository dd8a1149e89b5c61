#pragma once

#include "sklab/geometry.hpp"
#include "sklab/types.hpp"

namespace sklab::dist {

/// Result of an expectation integral with its achieved tolerance.
struct Expectation {
    double value = 0.0;
    double achieved_rel_tol = 0.0;
    bool converged = true;
};

/// Decomposition of end-to-end MSE per source dimension.
struct DistortionBreakdown {
    double weak_noise_or_channel = 0.0;
    double anomalous = 0.0;
    double approximation = 0.0;
    double total = 0.0;
    double sdr_db = 0.0;

    static DistortionBreakdown analytic(double weak_or_channel, double approximation, double sigma_x2);
};

/// Weak-noise MSE at a point of an expansion mapping: (sigma_n^2 / M) sum 1/g_ii.
/// Valid for a diagonal metric; for a non-orthogonal Jacobian falls back to the
/// full form (sigma_n^2 / M) trace(G^-1) and flags the mapping as suboptimally
/// parameterized via `used_full_form`.
double weak_noise_mse_at(const geom::SignalMapping& mapping, const Vec& x0, double sigma_n,
                         bool* used_full_form = nullptr);

/// Expectation of weak_noise_mse_at over the Gaussian source: 1-D adaptive
/// quadrature (splitting at declared seams), Gauss-Hermite tensor product for
/// M in {2, 3}, quasi-Monte-Carlo beyond. Relative tolerance 1e-4.
Expectation weak_noise_distortion(const geom::SignalMapping& mapping, const SourceSpec& source,
                                  double sigma_n);

/// Channel MSE at a point of a reduction surface: (sigma_n^2 / M) sum_i g_ii
/// (sum over the metric diagonal, not its reciprocals).
double channel_mse_at(const geom::SignalMapping& mapping, const Vec& z0, double sigma_n);

/// Expectation of channel_mse_at under the given channel-signal density over
/// the mapping's (1-D) parameter domain.
Expectation channel_distortion(const geom::SignalMapping& mapping,
                               const std::function<double(const Vec&)>& channel_density,
                               double sigma_n);

/// Lower bound on the approximation distortion of an M:N reduction with uniform
/// fold spacing delta: (M-N) delta^2 / (4 M (M-N+2)).
double approximation_distortion_bound(int source_dim, int channel_dim, double delta);

}  // namespace sklab::dist
