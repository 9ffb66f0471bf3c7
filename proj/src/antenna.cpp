#include "plrx/antenna.hpp"

#include "plrx/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace plrx {

namespace {
// High-frequency crowding of the strip current toward the edges raises
// the loss above the ideal two-face value.
constexpr double kStripEdgeFactor = 1.6;
} // namespace

void LoopGeometry::validate() const {
    if (!(outer_side > 0.0) || !(trace_width > 0.0))
        throw std::invalid_argument("LoopGeometry: dimensions must be positive");
    if (trace_width >= outer_side / 10.0)
        throw std::invalid_argument(
            "LoopGeometry: trace_width >= outer_side/10 invalidates the uniform-current model");
    if (!(conductivity > 0.0)) throw std::invalid_argument("LoopGeometry: conductivity must be positive");
    if (!(f_center > 0.0)) throw std::invalid_argument("LoopGeometry: f_center must be positive");
}

double LoopGeometry::ka(double f) const {
    const double k = 2.0 * kPi * f / kSpeedOfLight;
    const double a = mean_side() * std::sqrt(2.0) / 2.0;
    return k * a;
}

double AntennaEquivalent::radiation_resistance(double f) const {
    const double k = 2.0 * kPi * f / kSpeedOfLight;
    const double k2A = k * k * geom.area();
    return kFreeSpaceImpedance * k2A * k2A / (6.0 * kPi);
}

double AntennaEquivalent::conduction_resistance(double f) const {
    const double Rs = std::sqrt(kPi * f * kMu0 / geom.conductivity);
    return Rs * geom.perimeter() / (2.0 * geom.trace_width) * kStripEdgeFactor;
}

double AntennaEquivalent::series_resistance(double f) const {
    return radiation_resistance(f) + conduction_resistance(f);
}

double AntennaEquivalent::voc_peak(double f) const {
    return 2.0 * kPi * f * geom.area() / kSpeedOfLight;
}

double AntennaEquivalent::radiation_efficiency(double f) const {
    const double rr = radiation_resistance(f);
    return rr / (rr + conduction_resistance(f));
}

AntennaEquivalent loop_equivalent(const LoopGeometry& geom) {
    geom.validate();
    AntennaEquivalent ant;
    ant.geom = geom;
    // square loop of side s, equivalent wire radius = strip width / 4
    const double s = geom.mean_side();
    const double r0 = geom.trace_width / 4.0;
    ant.L_a = 2.0 * kMu0 * s / kPi * (std::log(s / r0) - 0.774);
    return ant;
}

} // namespace plrx
