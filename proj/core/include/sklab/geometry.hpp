#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sklab/types.hpp"

namespace sklab::geom {

/// Invertible scalar reparameterization applied to each parameter before the map.
struct Stretch {
    std::function<double(double)> forward;   // phi
    std::function<double(double)> inverse;   // phi^-1 (= ell on the reduction side)
    std::function<double(double)> derivative;
    std::string name = "identity";

    static Stretch identity();
    /// Odd power law phi(x) = sign(x) |x|^beta, beta > 0.
    static Stretch power_law(double beta);
};

/// A parametric M:N map. Expansion: parameters are source coordinates and the
/// image lives in channel space. Reduction: parameters are channel coordinates
/// and the image (the signal surface) lives in source space.
struct SignalMapping {
    Direction direction = Direction::expansion;
    int source_dim = 1;   // M
    int channel_dim = 1;  // N

    std::function<Vec(const Vec&)> map;                      // parameter -> image
    std::function<Mat(const Vec&)> analytic_jacobian;        // optional; image_dim x param_dim
    Domain domain;                                           // parameter domain
    std::vector<double> param_seams;                         // piecewise-C1 seam coordinates (1-D parameter only)

    // Catalog extras used by the simulator (optional):
    std::function<Vec(const Vec&)> encode;                   // reduction: source x -> channel z (nearest structure + ell)
    std::function<long(const Vec&)> fold_index;              // parameter -> fold/ring id for anomaly classification
    double fold_spacing = 0.0;                               // radial fold period (0 if not applicable)
    double min_fold_distance = 0.0;                          // actual minimum gap between folds

    std::string name;

    int param_dim() const { return direction == Direction::expansion ? source_dim : channel_dim; }
    int image_dim() const { return direction == Direction::expansion ? channel_dim : source_dim; }

    bool on_seam(const Vec& p, double tol = 0.0) const {
        if (p.size() == 1)
            for (double s : param_seams)
                if (std::abs(p(0) - s) <= tol) return true;
        return false;
    }
};

/// Jacobian plus derived metric quantities at a parameter point.
struct MetricData {
    Vec point;
    Mat jacobian;       // image_dim x param_dim
    Mat metric;         // G = J^T J, param_dim x param_dim
    Vec diagonal;       // g_ii
    bool positive_definite = true;
};

struct ShapeReport {
    bool is_shape_preserving = false;
    double max_diagonal_spread = 0.0;   // max |g_ii - g_jj|
    double max_off_diagonal = 0.0;      // max |g_ij|, i != j
    double alpha = 0.0;                 // sqrt(mean g_ii)
};

/// Jacobian at `point`: the analytic one if supplied, else second-order central
/// differences with scale-adaptive step. Throws std::domain_error if the point is
/// outside the domain or on a declared seam.
Mat jacobian(const SignalMapping& mapping, const Vec& point);

/// G = J^T J with diagonal and positive-definiteness flag.
MetricData metric_tensor(const SignalMapping& mapping, const Vec& point);

/// P = J G^-1 J^T for an expansion mapping. Throws std::runtime_error on a
/// degenerate (non-PD) metric; never regularizes silently.
Mat projection_matrix(const SignalMapping& mapping, const Vec& point);

/// Shape preservation over a sample of points: all g_ii equal and all g_ij ~ 0
/// relative to the mean diagonal, within tol.
ShapeReport shape_preservation_report(const SignalMapping& mapping,
                                      const std::vector<Vec>& sample_points, double tol);

}  // namespace sklab::geom
