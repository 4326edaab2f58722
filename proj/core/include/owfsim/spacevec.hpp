#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace owfsim {

/// Three-phase quantity as a complex space vector, amplitude-invariant
/// scaling, per unit. Frame (stationary or synchronous) is implied by usage.
using SpaceVector = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Base quantities of one per-unit system.
struct PerUnitBase {
    double s_base;      // VA
    double v_base;      // V, line-to-line rms
    double omega_base;  // rad/s

    /// Throws std::invalid_argument unless every base is finite and positive.
    void validate() const;

    /// Current base in A (rms) for the line voltage base.
    [[nodiscard]] double i_base() const;
    /// Impedance base in ohm.
    [[nodiscard]] double z_base() const;
};

/// Rating of one wind-turbine transformer, which defines the per-turbine base.
inline constexpr double kTurbineTransformerVA = 18.0e6;
/// Generator rating; informational only, string bases use the transformer.
inline constexpr double kTurbineGeneratorVA = 19.1e6;
inline constexpr double kCollectorVoltage = 66.0e3;
inline constexpr double kNominalFrequencyHz = 50.0;

/// Base system of a string that aggregates `n_wt` turbines.
[[nodiscard]] PerUnitBase string_base(int n_wt);

struct PowerPair {
    double p;
    double q;
};

/// Stationary to synchronous frame: v = v_s * exp(-j*phi).
[[nodiscard]] SpaceVector to_dq(SpaceVector v_s, double phi);

/// Synchronous to stationary frame: v_s = v * exp(+j*phi).
[[nodiscard]] SpaceVector to_alphabeta(SpaceVector v, double phi);

/// S = v * conj(i).
[[nodiscard]] PowerPair complex_power(SpaceVector v, SpaceVector i);

/// Wraps an angle to (-pi, pi].
[[nodiscard]] double wrap_angle(double phi);

/// Scales `v` onto the circle of radius `limit` if it lies outside it.
[[nodiscard]] SpaceVector clamp_magnitude(SpaceVector v, double limit);

[[nodiscard]] inline bool is_finite(SpaceVector v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

}  // namespace owfsim
