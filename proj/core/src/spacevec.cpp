#include "owfsim/spacevec.hpp"

#include <cmath>
#include <stdexcept>

namespace owfsim {

void PerUnitBase::validate() const {
    const auto ok = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!ok(s_base)) throw std::invalid_argument("per-unit base: s_base must be positive");
    if (!ok(v_base)) throw std::invalid_argument("per-unit base: v_base must be positive");
    if (!ok(omega_base)) throw std::invalid_argument("per-unit base: omega_base must be positive");
}

double PerUnitBase::i_base() const { return s_base / (std::sqrt(3.0) * v_base); }

double PerUnitBase::z_base() const { return v_base * v_base / s_base; }

PerUnitBase string_base(int n_wt) {
    if (n_wt <= 0) throw std::invalid_argument("string_base: n_wt must be positive");
    PerUnitBase base{n_wt * kTurbineTransformerVA, kCollectorVoltage, 2.0 * kPi * kNominalFrequencyHz};
    base.validate();
    return base;
}

SpaceVector to_dq(SpaceVector v_s, double phi) { return v_s * std::polar(1.0, -phi); }

SpaceVector to_alphabeta(SpaceVector v, double phi) { return v * std::polar(1.0, phi); }

PowerPair complex_power(SpaceVector v, SpaceVector i) {
    const SpaceVector s = v * std::conj(i);
    return {s.real(), s.imag()};
}

double wrap_angle(double phi) {
    double w = std::remainder(phi, 2.0 * kPi);  // [-pi, pi]
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

SpaceVector clamp_magnitude(SpaceVector v, double limit) {
    const double mag = std::abs(v);
    if (mag <= limit || mag == 0.0) return v;
    return v * (limit / mag);
}

}  // namespace owfsim
