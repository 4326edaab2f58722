#pragma once

#include <span>
#include <vector>

#include "owfsim/discrete.hpp"
#include "owfsim/spacevec.hpp"

namespace owfsim {

/// One collector-cable pi section, per unit on the string base.
struct CableParams {
    double r = 0.005;
    double l = 0.03;
    double c = 0.02;  // total; half at each end
};

/// Converter-side electrical data of one aggregated string (string base).
struct StringElectrical {
    double l_f = 0.18;
    double r_f = 0.01;
    CableParams cable{};
    double weight = 1.0;  // string base / system base
};

/// Averaged 24-pulse diode rectifier (system base).
struct DruParams {
    double k_dru = 1.23;     // no-load DC voltage per AC magnitude; starts conducting at ~0.81 pu into a rated link
    double r_comm = 0.25;    // commutation-equivalent resistance
    double kappa_q = 0.4;    // reactive consumption per unit of active power
    double l_smooth = 0.1;   // DC smoothing reactor between bridge and offshore capacitor
    double v_floor = 0.01;   // AC magnitude floor for the sink current
};

/// DC link: offshore capacitor, lumped R-L cable, onshore capacitor (system base).
struct HvdcParams {
    double c_off = 0.05;
    double r_dc = 0.01;
    double l_dc = 0.1;
    double c_on = 0.05;
};

/// Onshore DC-voltage-regulating current source.
struct OnshoreParams {
    double v_on_ref = 1.0;
    double bandwidth_hz = 25.0;
    double ff_bandwidth_hz = 25.0;
    bool feedforward = true;
    bool energize_allowed = false;
};

struct PlantParams {
    std::vector<StringElectrical> strings;
    double c_comp = 0.4;        // shunt compensation at the offshore bus, system base
    bool comp_connected = true;
    DruParams dru{};
    HvdcParams hvdc{};
    OnshoreParams onshore{};
    double omega_base = 2.0 * kPi * kNominalFrequencyHz;

    /// Total capacitance at the offshore bus in system per unit.
    [[nodiscard]] double bus_capacitance() const;
    void validate() const;
};

/// Continuous plant state as a flat vector (the integrator's view).
///
/// Layout: for every string [i_conv re/im, v_pcc re/im, i_cable re/im], then
/// v_off re/im, then i_dc, v_dc_off, i_dc_cable, v_on. String quantities are
/// on their string base, the rest on the system base.
class PlantState {
public:
    static constexpr std::size_t kPerString = 6;
    static constexpr std::size_t kShared = 6;

    PlantState() = default;
    explicit PlantState(std::size_t n_strings) : n_strings_(n_strings), x_(size_for(n_strings), 0.0) {}

    static std::size_t size_for(std::size_t n_strings) { return n_strings * kPerString + kShared; }

    [[nodiscard]] std::size_t n_strings() const { return n_strings_; }
    std::vector<double>& raw() { return x_; }
    [[nodiscard]] const std::vector<double>& raw() const { return x_; }

    [[nodiscard]] SpaceVector i_conv(std::size_t k) const { return get(k * kPerString); }
    [[nodiscard]] SpaceVector v_pcc(std::size_t k) const { return get(k * kPerString + 2); }
    [[nodiscard]] SpaceVector i_cable(std::size_t k) const { return get(k * kPerString + 4); }
    [[nodiscard]] SpaceVector v_off() const { return get(shared()); }
    [[nodiscard]] double i_dc() const { return x_[shared() + 2]; }
    [[nodiscard]] double v_dc_off() const { return x_[shared() + 3]; }
    [[nodiscard]] double i_dc_cable() const { return x_[shared() + 4]; }
    [[nodiscard]] double v_on() const { return x_[shared() + 5]; }

    void set_i_conv(std::size_t k, SpaceVector v) { set(k * kPerString, v); }
    void set_v_pcc(std::size_t k, SpaceVector v) { set(k * kPerString + 2, v); }
    void set_i_cable(std::size_t k, SpaceVector v) { set(k * kPerString + 4, v); }
    void set_v_off(SpaceVector v) { set(shared(), v); }
    void set_i_dc(double v) { x_[shared() + 2] = v; }
    void set_v_dc_off(double v) { x_[shared() + 3] = v; }
    void set_i_dc_cable(double v) { x_[shared() + 4] = v; }
    void set_v_on(double v) { x_[shared() + 5] = v; }

    /// Index helpers for code that writes derivatives into a raw vector.
    static std::size_t string_offset(std::size_t k) { return k * kPerString; }
    [[nodiscard]] std::size_t shared() const { return n_strings_ * kPerString; }

private:
    [[nodiscard]] SpaceVector get(std::size_t i) const { return {x_[i], x_[i + 1]}; }
    void set(std::size_t i, SpaceVector v) {
        x_[i] = v.real();
        x_[i + 1] = v.imag();
    }

    std::size_t n_strings_ = 0;
    std::vector<double> x_;
};

struct DruOutput {
    double v_rect = 0.0;         // DC voltage behind the commutation drop
    SpaceVector i_ac_sink{};     // AC current drawn from the offshore bus
    bool conducting = false;
};

/// Averaged rectifier: conducts when k|v_off| exceeds the offshore DC voltage or
/// DC current is still flowing. The AC sink carries P = v_rect * i_dc in phase
/// with v_off and kappa_q * P lagging.
[[nodiscard]] DruOutput dru_step(const DruParams& params, SpaceVector v_off, double i_dc, double v_dc_off);

/// Discrete state of the onshore source controller.
struct OnshoreState {
    double integrator = 0.0;
    TustinLowPass<double> ff_filter;
    double i_src = 0.0;
};

struct OnshoreGains {
    double kp;
    double ki;  // per second
};

/// PI gains that place the closed-loop DC-voltage bandwidth at `bandwidth_hz`.
[[nodiscard]] OnshoreGains onshore_gains(const OnshoreParams& params, const HvdcParams& hvdc, double omega_base);

[[nodiscard]] OnshoreState make_onshore_state(const OnshoreParams& params, double dt);

/// Current drawn from the link by the onshore converter (positive absorbs).
/// i_src = ff(i_dc_in) + kp (v_on - v_on_ref) + ki * integral; never negative
/// unless energizing is allowed.
double onshore_step(OnshoreState& state, const OnshoreParams& params, const OnshoreGains& gains, double v_on_meas,
                    double i_dc_in, double dt);

struct PlantInputs {
    std::span<const SpaceVector> v_conv;  // stationary frame, one per string
    double i_src = 0.0;
};

/// Time derivative (per second) of the plant state.
void plant_derivatives(const PlantParams& params, const PlantState& state, const PlantInputs& in,
                       std::vector<double>& dxdt);

/// Same, on the raw vector; used by the integrator.
void plant_derivatives(const PlantParams& params, const std::vector<double>& x, const PlantInputs& in,
                       std::vector<double>& dxdt);

/// Releases or holds the diode clamp after an accepted integration step.
void enforce_diode_clamp(std::vector<double>& x, std::size_t n_strings);

/// Energy bookkeeping in system per unit, with energy in pu * s.
struct PowerAudit {
    double stored_energy;
    double p_in;         // converter terminals
    double p_dissipated; // R_f, cable and DC resistances
    double p_exported;   // onshore source
};

[[nodiscard]] PowerAudit power_audit(const PlantParams& params, const PlantState& state, const PlantInputs& in);

}  // namespace owfsim
