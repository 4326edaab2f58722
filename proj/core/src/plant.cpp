#include "owfsim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace owfsim {

namespace {

void require(bool condition, const std::string& what) {
    if (!condition) throw std::invalid_argument("plant params: " + what);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }
bool non_negative(double x) { return std::isfinite(x) && x >= 0.0; }

SpaceVector load(const std::vector<double>& x, std::size_t i) { return {x[i], x[i + 1]}; }

void store(std::vector<double>& x, std::size_t i, SpaceVector v) {
    x[i] = v.real();
    x[i + 1] = v.imag();
}

}  // namespace

double PlantParams::bus_capacitance() const {
    double c = comp_connected ? c_comp : 0.0;
    for (const auto& s : strings) c += s.weight * 0.5 * s.cable.c;
    return c;
}

void PlantParams::validate() const {
    require(!strings.empty(), "at least one string is required");
    for (std::size_t k = 0; k < strings.size(); ++k) {
        const auto& s = strings[k];
        const std::string tag = "string " + std::to_string(k + 1) + ": ";
        require(positive(s.l_f), tag + "l_f must be positive");
        require(non_negative(s.r_f), tag + "r_f must be non-negative");
        require(non_negative(s.cable.r), tag + "cable.r must be non-negative");
        require(positive(s.cable.l), tag + "cable.l must be positive");
        require(positive(s.cable.c), tag + "cable.c must be positive");
        require(positive(s.weight), tag + "weight must be positive");
    }
    require(non_negative(c_comp), "c_comp must be non-negative");
    require(positive(bus_capacitance()), "offshore bus capacitance must be positive");
    require(positive(dru.k_dru), "dru.k_dru must be positive");
    require(non_negative(dru.r_comm), "dru.r_comm must be non-negative");
    require(non_negative(dru.kappa_q), "dru.kappa_q must be non-negative");
    require(positive(dru.l_smooth), "dru.l_smooth must be positive");
    require(positive(dru.v_floor), "dru.v_floor must be positive");
    require(positive(hvdc.c_off), "hvdc.c_off must be positive");
    require(non_negative(hvdc.r_dc), "hvdc.r_dc must be non-negative");
    require(positive(hvdc.l_dc), "hvdc.l_dc must be positive");
    require(positive(hvdc.c_on), "hvdc.c_on must be positive");
    require(non_negative(onshore.v_on_ref), "onshore.v_on_ref must be non-negative");
    require(positive(onshore.bandwidth_hz), "onshore.bandwidth_hz must be positive");
    require(positive(onshore.ff_bandwidth_hz), "onshore.ff_bandwidth_hz must be positive");
    require(positive(omega_base), "omega_base must be positive");
}

DruOutput dru_step(const DruParams& params, SpaceVector v_off, double i_dc, double v_dc_off) {
    DruOutput out;
    const double mag = std::abs(v_off);
    const double emf = params.k_dru * mag;
    const double i_fwd = std::max(i_dc, 0.0);
    out.conducting = emf > v_dc_off || i_fwd > 0.0;
    if (!out.conducting) {
        out.v_rect = emf;
        return out;
    }
    out.v_rect = std::max(emf - params.r_comm * i_fwd, 0.0);

    const double p = out.v_rect * i_fwd;
    SpaceVector v_eff = v_off;
    if (mag < params.v_floor) v_eff = mag > 0.0 ? v_off * (params.v_floor / mag) : SpaceVector(params.v_floor, 0.0);
    out.i_ac_sink = SpaceVector(p, -params.kappa_q * p) / std::conj(v_eff);
    return out;
}

OnshoreGains onshore_gains(const OnshoreParams& params, const HvdcParams& hvdc, double omega_base) {
    const double wc = 2.0 * kPi * params.bandwidth_hz;
    const double kp = wc * hvdc.c_on / omega_base;
    return {kp, kp * wc / 4.0};
}

OnshoreState make_onshore_state(const OnshoreParams& params, double dt) {
    OnshoreState s;
    s.ff_filter = TustinLowPass<double>(2.0 * kPi * params.ff_bandwidth_hz, dt);
    return s;
}

double onshore_step(OnshoreState& state, const OnshoreParams& params, const OnshoreGains& gains, double v_on_meas,
                    double i_dc_in, double dt) {
    const double ff = state.ff_filter.step(i_dc_in);
    const double error = v_on_meas - params.v_on_ref;
    double i_src = (params.feedforward ? ff : 0.0) + gains.kp * error + state.integrator;
    const bool clamped = !params.energize_allowed && i_src < 0.0;
    if (clamped) i_src = 0.0;
    if (!clamped || error > 0.0) state.integrator += dt * gains.ki * error;
    state.i_src = i_src;
    return i_src;
}

void plant_derivatives(const PlantParams& params, const std::vector<double>& x, const PlantInputs& in,
                       std::vector<double>& dxdt) {
    const std::size_t n = params.strings.size();
    const double wb = params.omega_base;
    dxdt.resize(x.size());

    const std::size_t shared = n * PlantState::kPerString;
    const SpaceVector v_off = load(x, shared);

    SpaceVector i_bus{};
    for (std::size_t k = 0; k < n; ++k) {
        const auto& s = params.strings[k];
        const std::size_t o = PlantState::string_offset(k);
        const SpaceVector i_conv = load(x, o);
        const SpaceVector v_pcc = load(x, o + 2);
        const SpaceVector i_cab = load(x, o + 4);
        store(dxdt, o, wb / s.l_f * (in.v_conv[k] - v_pcc - s.r_f * i_conv));
        store(dxdt, o + 2, wb / (0.5 * s.cable.c) * (i_conv - i_cab));
        store(dxdt, o + 4, wb / s.cable.l * (v_pcc - v_off - s.cable.r * i_cab));
        i_bus += s.weight * i_cab;
    }

    const double i_dc = x[shared + 2];
    const double v_dc_off = x[shared + 3];
    const double i_dc_cable = x[shared + 4];
    const double v_on = x[shared + 5];

    const DruOutput dru = dru_step(params.dru, v_off, i_dc, v_dc_off);
    store(dxdt, shared, wb / params.bus_capacitance() * (i_bus - dru.i_ac_sink));

    const double i_fwd = std::max(i_dc, 0.0);
    dxdt[shared + 2] = dru.conducting ? wb / params.dru.l_smooth * (dru.v_rect - v_dc_off) : 0.0;
    dxdt[shared + 3] = wb / params.hvdc.c_off * (i_fwd - i_dc_cable);
    dxdt[shared + 4] = wb / params.hvdc.l_dc * (v_dc_off - params.hvdc.r_dc * i_dc_cable - v_on);
    dxdt[shared + 5] = wb / params.hvdc.c_on * (i_dc_cable - in.i_src);
}

void plant_derivatives(const PlantParams& params, const PlantState& state, const PlantInputs& in,
                       std::vector<double>& dxdt) {
    plant_derivatives(params, state.raw(), in, dxdt);
}

void enforce_diode_clamp(std::vector<double>& x, std::size_t n_strings) {
    double& i_dc = x[n_strings * PlantState::kPerString + 2];
    if (i_dc < 0.0) i_dc = 0.0;
}

PowerAudit power_audit(const PlantParams& params, const PlantState& state, const PlantInputs& in) {
    const double inv_wb = 1.0 / params.omega_base;
    PowerAudit a{0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < params.strings.size(); ++k) {
        const auto& s = params.strings[k];
        const SpaceVector i_conv = state.i_conv(k);
        const SpaceVector i_cab = state.i_cable(k);
        a.stored_energy += s.weight * 0.5 * inv_wb *
                           (s.l_f * std::norm(i_conv) + 0.5 * s.cable.c * std::norm(state.v_pcc(k)) +
                            s.cable.l * std::norm(i_cab));
        a.p_in += s.weight * complex_power(in.v_conv[k], i_conv).p;
        a.p_dissipated += s.weight * (s.r_f * std::norm(i_conv) + s.cable.r * std::norm(i_cab));
    }
    a.stored_energy += 0.5 * inv_wb * params.bus_capacitance() * std::norm(state.v_off());
    a.stored_energy += 0.5 * inv_wb *
                       (params.dru.l_smooth * state.i_dc() * state.i_dc() +
                        params.hvdc.c_off * state.v_dc_off() * state.v_dc_off() +
                        params.hvdc.l_dc * state.i_dc_cable() * state.i_dc_cable() +
                        params.hvdc.c_on * state.v_on() * state.v_on());
    a.p_dissipated += params.hvdc.r_dc * state.i_dc_cable() * state.i_dc_cable();
    a.p_exported = in.i_src * state.v_on();
    return a;
}

}  // namespace owfsim
