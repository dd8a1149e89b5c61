#include <doctest.h>

#include <cmath>

#include "sklab/geometry.hpp"
#include "sklab/mappings.hpp"
#include "sklab/random.hpp"

using namespace sklab;

namespace {

Vec v1(double x) {
    Vec v(1);
    v << x;
    return v;
}

geom::SignalMapping scaled_identity(int m, double alpha) {
    return map::make_linear(m, m, alpha);
}

// Random point avoiding declared seams.
Vec random_param(const geom::SignalMapping& mapping, rng::Philox& gen, double range) {
    Vec p(mapping.param_dim());
    for (int tries = 0; tries < 100; ++tries) {
        for (int i = 0; i < p.size(); ++i) {
            const double lo = std::max(mapping.domain.lower(i), -range);
            const double hi = std::min(mapping.domain.upper(i), range);
            p(i) = lo + (hi - lo) * gen.next_uniform();
        }
        if (!mapping.on_seam(p, 1e-6) && mapping.domain.contains(p)) return p;
    }
    throw std::runtime_error("random_param: no seam-free point found");
}

std::vector<geom::SignalMapping> catalog() {
    std::vector<geom::SignalMapping> out;
    out.push_back(map::make_linear(1, 2, 1.5));
    out.push_back(map::make_linear(2, 4, 0.7));
    out.push_back(map::make_spiral_1_2(1.0));
    out.push_back(map::make_spiral_1_2(0.4, geom::Stretch::power_law(1.5)));
    out.push_back(map::make_circles_2_1(0.5, 6.0));
    out.push_back(map::make_stacked_circles_3_1(0.5, 6.0));
    return out;
}

}  // namespace

TEST_CASE("jacobian: closed-form cases") {
    const auto lin = map::make_linear(1, 1, 2.0);
    CHECK(geom::jacobian(lin, v1(3.7))(0, 0) == doctest::Approx(2.0).epsilon(1e-14));

    const auto spiral = map::make_spiral_1_2(1.0);
    const Mat j0 = geom::jacobian(spiral, v1(0.0));
    CHECK(j0(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(j0(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("jacobian: finite differences match a cubic polynomial's derivative") {
    geom::SignalMapping cubic;
    cubic.direction = Direction::expansion;
    cubic.source_dim = 2;
    cubic.channel_dim = 3;
    cubic.domain = Domain::all(2);
    cubic.map = [](const Vec& x) {
        Vec y(3);
        y << x(0) * x(0) * x(0) - 2.0 * x(1), 0.5 * x(0) * x(1) * x(1), x(0) + x(1) * x(1) * x(1);
        return y;
    };
    rng::Philox gen(42, 0);
    for (int k = 0; k < 20; ++k) {
        Vec x(2);
        x << 4.0 * gen.next_uniform() - 2.0, 4.0 * gen.next_uniform() - 2.0;
        Mat expect(3, 2);
        expect << 3.0 * x(0) * x(0), -2.0, 0.5 * x(1) * x(1), x(0) * x(1), 1.0, 3.0 * x(1) * x(1);
        const Mat j = geom::jacobian(cubic, x);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 2; ++c)
                CHECK(j(r, c) == doctest::Approx(expect(r, c)).epsilon(1e-6));
    }
}

TEST_CASE("jacobian: domain and seam violations throw") {
    const auto circles = map::make_circles_2_1(1.0, 6.0);
    Vec outside(1);
    outside << circles.domain.upper(0) + 1.0;
    CHECK_THROWS_AS(geom::jacobian(circles, outside), std::domain_error);
    REQUIRE(!circles.param_seams.empty());
    CHECK_THROWS_AS(geom::jacobian(circles, v1(circles.param_seams.front())), std::domain_error);
}

TEST_CASE("metric tensor: spiral diagonal and scaled identities") {
    const auto spiral = map::make_spiral_1_2(1.0);
    CHECK(geom::metric_tensor(spiral, v1(2.0)).diagonal(0) == doctest::Approx(5.0).epsilon(1e-10));

    const auto id3 = scaled_identity(3, 2.5);
    const auto md = geom::metric_tensor(id3, Vec::Zero(3));
    CHECK((md.metric - 6.25 * Mat::Identity(3, 3)).norm() < 1e-12);
    CHECK(md.positive_definite);

    geom::SignalMapping embed;
    embed.direction = Direction::expansion;
    embed.source_dim = 2;
    embed.channel_dim = 3;
    embed.domain = Domain::all(2);
    embed.map = [](const Vec& x) {
        Vec y(3);
        y << x(0), x(1), 0.0;
        return y;
    };
    Vec p(2);
    p << 0.3, -1.2;
    CHECK((geom::metric_tensor(embed, p).metric - Mat::Identity(2, 2)).norm() < 1e-8);
}

TEST_CASE("metric tensor: G symmetric, diagonal equals column norms") {
    rng::Philox gen(7, 0);
    for (const auto& m : catalog()) {
        const Vec p = random_param(m, gen, 3.0);
        const auto md = geom::metric_tensor(m, p);
        CHECK((md.metric - md.metric.transpose()).norm() < 1e-12);
        for (int i = 0; i < md.jacobian.cols(); ++i)
            CHECK(md.diagonal(i) ==
                  doctest::Approx(md.jacobian.col(i).squaredNorm()).epsilon(1e-12));
    }
}

TEST_CASE("projection matrix: diagonal projector for the 1:2 repeated map") {
    const auto lin = map::make_linear(1, 2, 1.0);
    const Mat p = geom::projection_matrix(lin, v1(0.2));
    Mat expect(2, 2);
    expect << 0.5, 0.5, 0.5, 0.5;
    CHECK((p - expect).norm() < 1e-12);
}

TEST_CASE("projection matrix: idempotent, symmetric, fixes tangents at random points") {
    rng::Philox gen(11, 0);
    for (const auto& m : catalog()) {
        if (m.direction != Direction::expansion) continue;
        for (int k = 0; k < 100; ++k) {
            const Vec x = random_param(m, gen, 4.0);
            const Mat p = geom::projection_matrix(m, x);
            CHECK((p * p - p).lpNorm<Eigen::Infinity>() < 1e-9);
            CHECK((p - p.transpose()).lpNorm<Eigen::Infinity>() < 1e-10);
            const Mat j = geom::jacobian(m, x);
            CHECK((p * j - j).lpNorm<Eigen::Infinity>() < 1e-8);
        }
    }
}

TEST_CASE("projection matrix: matches a Gram-Schmidt construction on the spiral") {
    const auto spiral = map::make_spiral_1_2(1.0);
    const Vec x = v1(M_PI / 2.0);
    const Mat j = geom::jacobian(spiral, x);
    const Vec q = j.col(0) / j.col(0).norm();
    const Mat expect = q * q.transpose();
    CHECK((geom::projection_matrix(spiral, x) - expect).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("shape preservation report") {
    std::vector<Vec> pts;
    for (double x = -2.0; x <= 2.0; x += 0.5) pts.push_back(v1(x));

    const auto rep_lin = geom::shape_preservation_report(map::make_linear(1, 2, 1.0), pts, 1e-9);
    CHECK(rep_lin.is_shape_preserving);
    CHECK(rep_lin.alpha == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    std::vector<Vec> pts3;
    Vec a = Vec::Zero(3), b = Vec::Ones(3);
    pts3.push_back(a);
    pts3.push_back(b);
    const auto rep_id = geom::shape_preservation_report(scaled_identity(3, 3.0), pts3, 1e-9);
    CHECK(rep_id.is_shape_preserving);
    CHECK(rep_id.alpha == doctest::Approx(3.0).epsilon(1e-12));

    std::vector<Vec> spiral_pts;
    for (double x = 0.1; x <= 2.0 * M_PI; x += 0.5) spiral_pts.push_back(v1(x));
    const auto rep_spiral =
        geom::shape_preservation_report(map::make_spiral_1_2(1.0), spiral_pts, 1e-3);
    CHECK(!rep_spiral.is_shape_preserving);
    CHECK(rep_spiral.max_diagonal_spread > 1.0);

    CHECK_THROWS_AS(geom::shape_preservation_report(map::make_spiral_1_2(1.0), {}, 1e-3),
                    std::invalid_argument);
}

TEST_CASE("analytic Jacobians match finite differences across the catalog") {
    rng::Philox gen(23, 0);
    for (const auto& m : catalog()) {
        if (!m.analytic_jacobian) continue;
        geom::SignalMapping numeric = m;
        numeric.analytic_jacobian = nullptr;
        for (int k = 0; k < 100; ++k) {
            const Vec p = random_param(m, gen, 4.0);
            const Mat ja = geom::jacobian(m, p);
            const Mat jn = geom::jacobian(numeric, p);
            const double scale = std::max(1.0, ja.lpNorm<Eigen::Infinity>());
            CHECK((ja - jn).lpNorm<Eigen::Infinity>() / scale < 1e-6);
        }
    }
}

TEST_CASE("orthogonal Jacobian columns give a diagonal metric with reciprocal inverse") {
    const auto lin = map::make_linear(2, 4, 1.3);
    const auto md = geom::metric_tensor(lin, Vec::Zero(2));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (i != j) CHECK(std::abs(md.metric(i, j)) < 1e-10);
    const Mat inv = md.metric.inverse();
    for (int i = 0; i < 2; ++i)
        CHECK(inv(i, i) == doctest::Approx(1.0 / md.diagonal(i)).epsilon(1e-10));
}
