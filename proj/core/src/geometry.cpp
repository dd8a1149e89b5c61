#include "sklab/geometry.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace sklab::geom {

Stretch Stretch::identity() {
    Stretch s;
    s.forward = [](double x) { return x; };
    s.inverse = [](double x) { return x; };
    s.derivative = [](double) { return 1.0; };
    s.name = "identity";
    return s;
}

Stretch Stretch::power_law(double beta) {
    if (beta <= 0) throw std::invalid_argument("Stretch::power_law: beta must be positive");
    Stretch s;
    s.forward = [beta](double x) { return x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), beta), x); };
    s.inverse = [beta](double y) { return y == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(y), 1.0 / beta), y); };
    s.derivative = [beta](double x) { return beta * std::pow(std::abs(x), beta - 1.0); };
    s.name = "power_law";
    return s;
}

Mat jacobian(const SignalMapping& mapping, const Vec& point) {
    if (!mapping.domain.contains(point))
        throw std::domain_error("jacobian: point outside mapping domain");
    if (mapping.on_seam(point))
        throw std::domain_error("jacobian: point on a piecewise seam; evaluate one-sided");
    if (mapping.analytic_jacobian) return mapping.analytic_jacobian(point);

    const int pd = mapping.param_dim();
    const int id = mapping.image_dim();
    Mat jac(id, pd);
    Vec lo = point, hi = point;
    for (int i = 0; i < pd; ++i) {
        const double h = std::max(1e-6, 1e-6 * std::abs(point(i)));
        hi(i) = point(i) + h;
        lo(i) = point(i) - h;
        jac.col(i) = (mapping.map(hi) - mapping.map(lo)) / (2.0 * h);
        hi(i) = point(i);
        lo(i) = point(i);
    }
    return jac;
}

MetricData metric_tensor(const SignalMapping& mapping, const Vec& point) {
    MetricData m;
    m.point = point;
    m.jacobian = jacobian(mapping, point);
    m.metric = m.jacobian.transpose() * m.jacobian;
    m.diagonal = m.metric.diagonal();
    Eigen::LDLT<Mat> ldlt(m.metric);
    m.positive_definite = ldlt.info() == Eigen::Success && ldlt.isPositive()
                       && m.metric.diagonal().minCoeff() > 1e-10 * m.metric.diagonal().maxCoeff();
    return m;
}

Mat projection_matrix(const SignalMapping& mapping, const Vec& point) {
    if (mapping.direction != Direction::expansion)
        throw std::invalid_argument("projection_matrix: defined for expansion mappings");
    MetricData m = metric_tensor(mapping, point);
    if (!m.positive_definite)
        throw std::runtime_error("projection_matrix: degenerate metric at point (G not positive definite)");
    Eigen::LDLT<Mat> ldlt(m.metric);
    Mat ginv_jt = ldlt.solve(m.jacobian.transpose());
    return m.jacobian * ginv_jt;
}

ShapeReport shape_preservation_report(const SignalMapping& mapping,
                                      const std::vector<Vec>& sample_points, double tol) {
    if (sample_points.size() < 2)
        throw std::invalid_argument("shape_preservation_report: need at least 2 sample points");
    ShapeReport rep;
    double gmin = std::numeric_limits<double>::infinity();
    double gmax = 0.0;
    double gsum = 0.0;
    long gcount = 0;
    for (const Vec& p : sample_points) {
        MetricData m = metric_tensor(mapping, p);
        const int d = static_cast<int>(m.diagonal.size());
        for (int i = 0; i < d; ++i) {
            gmin = std::min(gmin, m.diagonal(i));
            gmax = std::max(gmax, m.diagonal(i));
            gsum += m.diagonal(i);
            ++gcount;
            for (int j = i + 1; j < d; ++j)
                rep.max_off_diagonal = std::max(rep.max_off_diagonal, std::abs(m.metric(i, j)));
        }
    }
    const double gmean = gsum / gcount;
    rep.max_diagonal_spread = gmax - gmin;
    rep.alpha = std::sqrt(gmean);
    rep.is_shape_preserving = rep.max_diagonal_spread <= tol * gmean && rep.max_off_diagonal <= tol * gmean;
    return rep;
}

}  // namespace sklab::geom
