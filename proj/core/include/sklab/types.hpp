#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sklab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Direction of a dimension-changing mapping.
/// Expansion: source x in R^M mapped onto a surface in channel space R^N (M <= N).
/// Reduction: surface in source space R^M parameterized by channel vector z in R^N (N <= M).
enum class Direction { expansion, reduction };

/// Parameter domain of a mapping: an axis-aligned box or a centered ball.
struct Domain {
    enum class Kind { box, ball };

    Kind kind = Kind::box;
    Vec lower, upper;     // box bounds (may be +-inf)
    double radius = 0.0;  // ball radius

    static Domain all(int dim) {
        Domain d;
        d.kind = Kind::box;
        d.lower = Vec::Constant(dim, -std::numeric_limits<double>::infinity());
        d.upper = Vec::Constant(dim, std::numeric_limits<double>::infinity());
        return d;
    }
    static Domain box(Vec lo, Vec hi) {
        Domain d;
        d.kind = Kind::box;
        d.lower = std::move(lo);
        d.upper = std::move(hi);
        return d;
    }
    static Domain ball(int dim, double r) {
        Domain d;
        d.kind = Kind::ball;
        d.radius = r;
        d.lower = Vec::Constant(dim, -r);
        d.upper = Vec::Constant(dim, r);
        return d;
    }

    int dim() const { return static_cast<int>(lower.size()); }

    bool contains(const Vec& p) const {
        if (kind == Kind::ball) return p.norm() <= radius;
        return (p.array() >= lower.array()).all() && (p.array() <= upper.array()).all();
    }
};

/// AWGN channel: per-dimension power constraint and noise variance.
struct ChannelSpec {
    double power_per_dim = 1.0;  // P_N
    double noise_var = 1.0;      // sigma_n^2 per dimension

    ChannelSpec() = default;
    ChannelSpec(double p, double nv) : power_per_dim(p), noise_var(nv) {
        if (p <= 0 || nv <= 0) throw std::invalid_argument("ChannelSpec: power and noise variance must be positive");
    }
    double csnr() const { return power_per_dim / noise_var; }
    double csnr_db() const { return 10.0 * std::log10(csnr()); }
    double sigma_n() const { return std::sqrt(noise_var); }

    static ChannelSpec from_csnr_db(double power, double csnr_db_) {
        double csnr = std::pow(10.0, csnr_db_ / 10.0);
        return ChannelSpec(power, power / csnr);
    }
};

/// Zero-mean i.i.d. Gaussian source with per-component variance sigma_x^2,
/// truncated at `truncation_sigmas` standard deviations for numeric work.
struct SourceSpec {
    int dimension = 1;
    double sigma_x = 1.0;
    double truncation_sigmas = 6.0;

    SourceSpec() = default;
    SourceSpec(int m, double sx, double trunc = 6.0) : dimension(m), sigma_x(sx), truncation_sigmas(trunc) {
        if (m < 1) throw std::invalid_argument("SourceSpec: dimension must be >= 1");
        if (sx <= 0) throw std::invalid_argument("SourceSpec: sigma_x must be positive");
        if (trunc < 6.0) throw std::invalid_argument("SourceSpec: truncation must be >= 6 sigma");
    }
    double variance() const { return sigma_x * sigma_x; }
    double truncation_radius() const { return truncation_sigmas * sigma_x; }
};

inline double db(double ratio) { return 10.0 * std::log10(ratio); }
inline double from_db(double d) { return std::pow(10.0, d / 10.0); }

}  // namespace sklab
