#include "sklab/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace sklab::map {

using geom::SignalMapping;
using geom::Stretch;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap_2pi(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0) t += kTwoPi;
    return t;
}

}  // namespace

MappingKind mapping_kind_from_string(const std::string& s) {
    if (s == "linear") return MappingKind::linear;
    if (s == "spiral_1_2") return MappingKind::spiral_1_2;
    if (s == "circles_2_1") return MappingKind::circles_2_1;
    if (s == "stacked_circles_3_1") return MappingKind::stacked_circles_3_1;
    throw std::invalid_argument("unknown mapping kind: " + s);
}

std::string to_string(MappingKind k) {
    switch (k) {
        case MappingKind::linear: return "linear";
        case MappingKind::spiral_1_2: return "spiral_1_2";
        case MappingKind::circles_2_1: return "circles_2_1";
        case MappingKind::stacked_circles_3_1: return "stacked_circles_3_1";
    }
    return "?";
}

geom::SignalMapping MappingSpec::build() const {
    Stretch st = stretch == StretchKind::identity ? Stretch::identity() : Stretch::power_law(beta);
    switch (kind) {
        case MappingKind::linear: return make_linear(source_dim, channel_dim, alpha);
        case MappingKind::spiral_1_2: return make_spiral_1_2(a, st);
        case MappingKind::circles_2_1: return make_circles_2_1(delta, truncation_radius);
        case MappingKind::stacked_circles_3_1: return make_stacked_circles_3_1(delta, truncation_radius);
    }
    throw std::logic_error("MappingSpec::build: unreachable");
}

geom::SignalMapping make_linear(int source_dim, int channel_dim, double alpha) {
    if (source_dim < 1 || channel_dim < source_dim)
        throw std::invalid_argument("make_linear: requires 1 <= M <= N");
    if (alpha == 0.0) throw std::invalid_argument("make_linear: zero gain");

    Mat embed = Mat::Zero(channel_dim, source_dim);
    for (int i = 0; i < channel_dim; ++i) embed(i, i % source_dim) = alpha;

    SignalMapping m;
    m.direction = Direction::expansion;
    m.source_dim = source_dim;
    m.channel_dim = channel_dim;
    m.domain = Domain::all(source_dim);
    m.map = [embed](const Vec& x) -> Vec { return embed * x; };
    m.analytic_jacobian = [embed](const Vec&) -> Mat { return embed; };
    m.name = "linear";
    return m;
}

geom::SignalMapping make_spiral_1_2(double a, geom::Stretch stretch) {
    if (a <= 0) throw std::invalid_argument("make_spiral_1_2: pitch must be positive");
    auto st = std::make_shared<Stretch>(std::move(stretch));

    SignalMapping m;
    m.direction = Direction::expansion;
    m.source_dim = 1;
    m.channel_dim = 2;
    m.domain = Domain::all(1);
    m.fold_spacing = kTwoPi * a;
    m.min_fold_distance = M_PI * a;  // interleaved mirror branch
    m.name = "spiral_1_2";
    if (st->name != "identity") m.param_seams = {0.0};

    m.map = [a, st](const Vec& x) -> Vec {
        const double u = std::abs(x(0));
        const double sgn = x(0) < 0 ? -1.0 : 1.0;
        const double phi = st->forward(u);
        Vec s(2);
        s << sgn * a * phi * std::cos(phi), sgn * a * phi * std::sin(phi);
        return s;
    };
    // d s / d x is even in x for the point-mirrored branch.
    m.analytic_jacobian = [a, st](const Vec& x) -> Mat {
        const double u = std::abs(x(0));
        const double phi = st->forward(u);
        const double dphi = st->derivative(u);
        Mat jac(2, 1);
        jac << a * dphi * (std::cos(phi) - phi * std::sin(phi)),
               a * dphi * (std::sin(phi) + phi * std::cos(phi));
        return jac;
    };
    // Radial turn number. The two point-mirrored branches meet smoothly at the
    // origin, so the fold boundary sits at |phi| = 2*pi*k, not at x = 0; a sign
    // flip near the origin stays within fold 0 and is judged by the norm rule.
    m.fold_index = [st](const Vec& x) -> long {
        const double phi = st->forward(std::abs(x(0)));
        return static_cast<long>(std::floor(phi / kTwoPi));
    };
    return m;
}

namespace {

// Concentric rings, serialized by cumulative arc length. Ring k has radius
// k*delta and occupies z in [pi*delta*k*(k-1), pi*delta*k*(k+1)].
struct RingTable {
    double delta;
    int max_ring;

    double start(int k) const { return M_PI * delta * k * (k - 1.0); }
    double total_length() const { return start(max_ring + 1); }
    int direction(int k) const { return k % 2 == 1 ? +1 : -1; }

    // z = 0 is the origin (ring 0); ring k >= 1 owns (start(k), start(k+1)],
    // so the shared boundary belongs to the inner ring at angle 2*pi.
    int ring_of_arc(double u) const {
        if (u <= 0.0) return 0;
        int k = static_cast<int>(std::lround(std::sqrt(u / (M_PI * delta) + 0.25)));
        k = std::clamp(k, 1, max_ring);
        while (k > 1 && u <= start(k)) --k;
        while (k < max_ring && u > start(k + 1)) ++k;
        return k;
    }
    // Ties at (k + 1/2) delta break toward the inner ring (with a small
    // tolerance so rounding noise does not flip a midpoint outward).
    int nearest_ring(double r) const {
        int k = static_cast<int>(std::ceil(r / delta - 0.5 - 1e-9));
        return std::clamp(k, 0, max_ring);
    }
};

}  // namespace

geom::SignalMapping make_circles_2_1(double delta, double truncation_radius) {
    if (delta <= 0) throw std::invalid_argument("make_circles_2_1: delta must be positive");
    if (truncation_radius <= 0) throw std::invalid_argument("make_circles_2_1: truncation radius must be positive");

    auto tab = std::make_shared<RingTable>();
    tab->delta = delta;
    tab->max_ring = std::max(1, static_cast<int>(std::lround(std::ceil(truncation_radius / delta))));
    const double zmax = tab->total_length();

    // Decompose the arc coordinate into (ring, angle).
    auto locate = [tab](double z, int& k, double& theta) {
        const double u = std::clamp(z, 0.0, tab->total_length());
        k = tab->ring_of_arc(u);
        theta = 0.0;
        if (k > 0) {
            const double local = (u - tab->start(k)) / (k * tab->delta);
            theta = tab->direction(k) * local;
        }
    };

    SignalMapping m;
    m.direction = Direction::reduction;
    m.source_dim = 2;
    m.channel_dim = 1;
    m.domain = Domain::box(Vec::Constant(1, 0.0), Vec::Constant(1, zmax));
    m.fold_spacing = delta;
    m.min_fold_distance = delta;
    m.name = "circles_2_1";
    for (int k = 1; k <= tab->max_ring + 1; ++k) m.param_seams.push_back(tab->start(k));

    m.map = [tab, locate](const Vec& z) -> Vec {
        int k;
        double theta;
        locate(z(0), k, theta);
        Vec x(2);
        x << k * tab->delta * std::cos(theta), k * tab->delta * std::sin(theta);
        return x;
    };
    m.analytic_jacobian = [tab, locate](const Vec& z) -> Mat {
        int k;
        double theta;
        locate(z(0), k, theta);
        Mat jac(2, 1);
        if (k == 0) {
            jac.setZero();  // degenerate ring-0 point
            return jac;
        }
        // Mirror and chain-rule signs cancel: d theta / d z = dir / (k delta) on both branches.
        const double dtheta = tab->direction(k);
        jac << -std::sin(theta) * dtheta, std::cos(theta) * dtheta;
        return jac;
    };
    m.encode = [tab](const Vec& x) -> Vec {
        const double r = std::hypot(x(0), x(1));
        const int k = tab->nearest_ring(r);
        Vec z(1);
        if (k == 0) {
            z(0) = 0.0;
            return z;
        }
        const double theta = std::atan2(x(1), x(0));
        double w = wrap_2pi(tab->direction(k) * theta);
        if (w == 0.0) w = kTwoPi;  // angle 0 lives at the top of its ring's arc
        z(0) = tab->start(k) + k * tab->delta * w;
        return z;
    };
    m.fold_index = [tab](const Vec& z) -> long {
        return tab->ring_of_arc(std::clamp(z(0), 0.0, tab->total_length()));
    };
    return m;
}

namespace {

// Circles of radius n*delta on planes x3 = m*delta, plane-major arc-length order.
struct StackedTable {
    double delta;
    struct Circle {
        int plane;   // m
        int radius;  // n
        double start;
        double length;
        int dir;
    };
    std::vector<Circle> circles;
    int max_plane;
    double total = 0.0;
    // (plane + max_plane) -> index of that plane's first circle, for encode().
    std::vector<int> plane_first;
    std::vector<int> plane_rings;  // max radius index per plane

    int circle_of_arc(double u) const {
        auto it = std::upper_bound(circles.begin(), circles.end(), u,
                                   [](double v, const Circle& c) { return v < c.start; });
        int idx = static_cast<int>(it - circles.begin()) - 1;
        return std::clamp(idx, 0, static_cast<int>(circles.size()) - 1);
    }
};

}  // namespace

geom::SignalMapping make_stacked_circles_3_1(double delta, double truncation_radius) {
    if (delta <= 0) throw std::invalid_argument("make_stacked_circles_3_1: delta must be positive");
    if (truncation_radius <= 0)
        throw std::invalid_argument("make_stacked_circles_3_1: truncation radius must be positive");

    auto tab = std::make_shared<StackedTable>();
    tab->delta = delta;
    tab->max_plane = static_cast<int>(std::lround(std::ceil(truncation_radius / delta)));
    double offset = 0.0;
    int dir = +1;
    for (int mplane = -tab->max_plane; mplane <= tab->max_plane; ++mplane) {
        const double h = mplane * delta;
        const double disc = truncation_radius * truncation_radius - h * h;
        const int nmax = disc > 0 ? static_cast<int>(std::lround(std::ceil(std::sqrt(disc) / delta))) : 0;
        tab->plane_first.push_back(static_cast<int>(tab->circles.size()));
        tab->plane_rings.push_back(nmax);
        for (int n = 0; n <= nmax; ++n) {
            const double len = kTwoPi * n * delta;
            tab->circles.push_back({mplane, n, offset, len, dir});
            offset += len;
            dir = -dir;
        }
    }
    tab->total = offset;

    auto locate = [tab](double z, int& idx, double& theta) {
        const double u = std::clamp(z, 0.0, tab->total);
        idx = tab->circle_of_arc(u);
        const auto& c = tab->circles[idx];
        theta = c.radius > 0 ? c.dir * (u - c.start) / (c.radius * tab->delta) : 0.0;
    };

    SignalMapping m;
    m.direction = Direction::reduction;
    m.source_dim = 3;
    m.channel_dim = 1;
    m.domain = Domain::box(Vec::Constant(1, 0.0), Vec::Constant(1, tab->total));
    m.fold_spacing = delta;
    m.min_fold_distance = delta;
    m.name = "stacked_circles_3_1";
    for (const auto& c : tab->circles) m.param_seams.push_back(c.start);
    m.param_seams.push_back(tab->total);

    m.map = [tab, locate](const Vec& z) -> Vec {
        int idx;
        double theta;
        locate(z(0), idx, theta);
        const auto& c = tab->circles[idx];
        const double r = c.radius * tab->delta;
        Vec x(3);
        x << r * std::cos(theta), r * std::sin(theta), c.plane * tab->delta;
        return x;
    };
    m.analytic_jacobian = [tab, locate](const Vec& z) -> Mat {
        int idx;
        double theta;
        locate(z(0), idx, theta);
        const auto& c = tab->circles[idx];
        Mat jac(3, 1);
        if (c.radius == 0) {
            jac.setZero();
            return jac;
        }
        jac << -std::sin(theta) * c.dir, std::cos(theta) * c.dir, 0.0;
        return jac;
    };
    m.encode = [tab](const Vec& x) -> Vec {
        const int mp = std::clamp(static_cast<int>(std::lround(x(2) / tab->delta)),
                                  -tab->max_plane, tab->max_plane);
        const int pidx = mp + tab->max_plane;
        const double r = std::hypot(x(0), x(1));
        const int n = std::clamp(static_cast<int>(std::ceil(r / tab->delta - 0.5)), 0,
                                 tab->plane_rings[pidx]);
        const auto& c = tab->circles[tab->plane_first[pidx] + n];
        Vec z(1);
        if (n == 0) {
            z(0) = c.start;
            return z;
        }
        const double theta = std::atan2(x(1), x(0));
        z(0) = c.start + n * tab->delta * wrap_2pi(c.dir * theta);
        return z;
    };
    m.fold_index = [tab](const Vec& z) -> long { return tab->circle_of_arc(std::clamp(z(0), 0.0, tab->total)); };
    return m;
}

}  // namespace sklab::map
