#pragma once

#include <string>

#include "sklab/geometry.hpp"

namespace sklab::map {

enum class MappingKind { linear, spiral_1_2, circles_2_1, stacked_circles_3_1 };

enum class StretchKind { identity, power_law };

/// Declarative mapping description (addressable from the CLI config).
struct MappingSpec {
    MappingKind kind = MappingKind::linear;
    int source_dim = 1;   // linear only
    int channel_dim = 1;  // linear only
    double alpha = 1.0;   // linear gain
    double a = 1.0;       // spiral pitch
    double delta = 1.0;   // fold spacing of the reduction structures
    StretchKind stretch = StretchKind::identity;
    double beta = 1.0;    // power-law stretch exponent
    double truncation_radius = 6.0;  // reduction structures sized to this ball

    geom::SignalMapping build() const;
};

MappingKind mapping_kind_from_string(const std::string& s);
std::string to_string(MappingKind k);

/// Repetition-style linear expansion S(x) = alpha * E x, channel component i
/// carrying source component i mod M. Shape preserving when M divides N.
geom::SignalMapping make_linear(int source_dim, int channel_dim, double alpha);

/// 1:2 Archimedean spiral s(x) = (a phi cos phi, a phi sin phi), phi = stretch(x),
/// with a point-mirrored branch for x < 0 so the source domain is all of R.
/// Single-branch radial fold period 2*pi*a; interleaved branch gap pi*a.
geom::SignalMapping make_spiral_1_2(double a, geom::Stretch stretch = geom::Stretch::identity());

/// 2:1 reduction onto concentric circles of radius k*delta. The scalar channel
/// coordinate is cumulative arc length along the rings (alternating angular
/// direction per ring); ties at ring midpoints break toward the inner ring.
geom::SignalMapping make_circles_2_1(double delta, double truncation_radius = 6.0);

/// 3:1 reduction onto circles of radius n*delta on planes spaced delta apart,
/// filling a ball of the given radius; serialized plane-major by arc length.
geom::SignalMapping make_stacked_circles_3_1(double delta, double truncation_radius = 6.0);

}  // namespace sklab::map
