#include "sklab/distortion.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "sklab/quadrature.hpp"

namespace sklab::dist {

namespace {

double gaussian_pdf(double x, double sigma) {
    return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * M_PI));
}

// Acklam's rational approximation, polished with one Halley step on std::erf.
double inverse_normal_cdf(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01, -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    double x;
    if (p < 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 0.97575) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double halton(long index, int base) {
    double f = 1.0, r = 0.0;
    for (long i = index; i > 0; i /= base) {
        f /= base;
        r += f * (i % base);
    }
    return r;
}

}  // namespace

DistortionBreakdown DistortionBreakdown::analytic(double weak_or_channel, double approximation,
                                                  double sigma_x2) {
    DistortionBreakdown b;
    b.weak_noise_or_channel = weak_or_channel;
    b.approximation = approximation;
    b.anomalous = 0.0;
    b.total = weak_or_channel + approximation;
    b.sdr_db = db(sigma_x2 / b.total);
    return b;
}

double weak_noise_mse_at(const geom::SignalMapping& mapping, const Vec& x0, double sigma_n,
                         bool* used_full_form) {
    if (mapping.direction != Direction::expansion)
        throw std::invalid_argument("weak_noise_mse_at: expansion mapping required");
    geom::MetricData m = geom::metric_tensor(mapping, x0);
    if (!m.positive_definite)
        throw std::runtime_error("weak_noise_mse_at: singular metric at x0");

    const int dim = static_cast<int>(m.diagonal.size());
    const double mean_g = m.diagonal.mean();
    double max_off = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) max_off = std::max(max_off, std::abs(m.metric(i, j)));

    const double s2 = sigma_n * sigma_n;
    if (max_off < 1e-8 * mean_g) {
        if (used_full_form) *used_full_form = false;
        return s2 / mapping.source_dim * m.diagonal.cwiseInverse().sum();
    }
    // Non-orthogonal Jacobian: full form via trace(G^-1).
    if (used_full_form) *used_full_form = true;
    Eigen::LDLT<Mat> ldlt(m.metric);
    Mat ginv = ldlt.solve(Mat::Identity(dim, dim));
    return s2 / mapping.source_dim * ginv.trace();
}

namespace {

// Tensor Gauss-Hermite expectation of f under N(0, sigma^2 I) in `dim` dimensions.
double gh_expectation(const std::function<double(const Vec&)>& f, int dim, double sigma, int nodes) {
    std::vector<double> t, w;
    quad::gauss_hermite(nodes, t, w);
    const double norm = std::pow(M_PI, -0.5 * dim);
    Vec x(dim);
    std::vector<int> idx(dim, 0);
    double acc = 0.0;
    while (true) {
        double weight = norm;
        for (int d = 0; d < dim; ++d) {
            x(d) = std::sqrt(2.0) * sigma * t[idx[d]];
            weight *= w[idx[d]];
        }
        acc += weight * f(x);
        int d = 0;
        while (d < dim && ++idx[d] == nodes) idx[d++] = 0;
        if (d == dim) break;
    }
    return acc;
}

Expectation expectation_over_gaussian(const std::function<double(const Vec&)>& f,
                                      const SourceSpec& source,
                                      const std::vector<double>& seams) {
    const int dim = source.dimension;
    Expectation out;
    if (dim == 1) {
        const double lim = source.truncation_radius();
        auto g = [&](double x) {
            Vec v(1);
            v << x;
            return f(v) * gaussian_pdf(x, source.sigma_x);
        };
        auto q = quad::integrate_split(g, -lim, lim, seams, 0.0, 1e-7);
        out.value = q.value;
        out.achieved_rel_tol = q.value != 0.0 ? q.abs_error / std::abs(q.value) : q.abs_error;
        out.converged = out.achieved_rel_tol <= 1e-4;
        return out;
    }
    if (dim <= 3) {
        double prev = 0.0;
        for (int nodes : {8, 16, 32, 64, 128}) {
            if (dim == 3 && nodes > 64) break;
            const double v = gh_expectation(f, dim, source.sigma_x, nodes);
            if (nodes > 8) {
                out.achieved_rel_tol = std::abs(v - prev) / std::max(std::abs(v), 1e-300);
                out.value = v;
                if (out.achieved_rel_tol <= 1e-4) return out;
            }
            prev = v;
        }
        out.converged = out.achieved_rel_tol <= 1e-4;
        return out;
    }
    // Quasi-Monte-Carlo with inverse-normal transformed Halton points.
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (dim > 12) throw std::invalid_argument("weak_noise_distortion: source dimension > 12 unsupported");
    Vec x(dim);
    double acc = 0.0;
    long n = 0;
    double prev_mean = 0.0;
    for (long block = 0; block < 64; ++block) {
        for (long i = 0; i < 16384; ++i) {
            const long k = block * 16384 + i + 1;
            for (int d = 0; d < dim; ++d)
                x(d) = source.sigma_x * inverse_normal_cdf(halton(k, primes[d]));
            acc += f(x);
            ++n;
        }
        const double mean = acc / n;
        if (block > 0) {
            out.achieved_rel_tol = std::abs(mean - prev_mean) / std::max(std::abs(mean), 1e-300);
            out.value = mean;
            if (out.achieved_rel_tol <= 1e-4) return out;
        }
        prev_mean = mean;
    }
    out.converged = false;
    return out;
}

}  // namespace

Expectation weak_noise_distortion(const geom::SignalMapping& mapping, const SourceSpec& source,
                                  double sigma_n) {
    if (mapping.direction != Direction::expansion)
        throw std::invalid_argument("weak_noise_distortion: expansion mapping required");
    if (source.dimension != mapping.source_dim)
        throw std::invalid_argument("weak_noise_distortion: source dimension mismatch");
    auto f = [&](const Vec& x) { return weak_noise_mse_at(mapping, x, sigma_n); };
    return expectation_over_gaussian(f, source, mapping.param_seams);
}

double channel_mse_at(const geom::SignalMapping& mapping, const Vec& z0, double sigma_n) {
    if (mapping.direction != Direction::reduction)
        throw std::invalid_argument("channel_mse_at: reduction mapping required");
    geom::MetricData m = geom::metric_tensor(mapping, z0);
    return sigma_n * sigma_n / mapping.source_dim * m.diagonal.sum();
}

Expectation channel_distortion(const geom::SignalMapping& mapping,
                               const std::function<double(const Vec&)>& channel_density,
                               double sigma_n) {
    if (mapping.direction != Direction::reduction)
        throw std::invalid_argument("channel_distortion: reduction mapping required");
    if (mapping.channel_dim != 1)
        throw std::invalid_argument("channel_distortion: implemented for scalar channels");
    const double lo = mapping.domain.lower(0);
    const double hi = mapping.domain.upper(0);
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("channel_distortion: parameter domain must be bounded");

    auto g = [&](double z) {
        Vec v(1);
        v << z;
        // channel_mse_at rejects seam points; nudge off junctions.
        if (mapping.on_seam(v)) v(0) = std::nextafter(z, hi);
        return channel_mse_at(mapping, v, sigma_n) * channel_density(v);
    };
    auto q = quad::integrate_split(g, lo, hi, mapping.param_seams, 0.0, 1e-7);
    Expectation out;
    out.value = q.value;
    out.achieved_rel_tol = q.value != 0.0 ? q.abs_error / std::abs(q.value) : q.abs_error;
    out.converged = out.achieved_rel_tol <= 1e-4;
    return out;
}

double approximation_distortion_bound(int source_dim, int channel_dim, double delta) {
    if (!(source_dim > channel_dim && channel_dim >= 1))
        throw std::invalid_argument("approximation_distortion_bound: requires M > N >= 1");
    if (delta <= 0) throw std::invalid_argument("approximation_distortion_bound: delta must be positive");
    const double m = source_dim - channel_dim;
    return m * delta * delta / (4.0 * source_dim * (m + 2.0));
}

}  // namespace sklab::dist
