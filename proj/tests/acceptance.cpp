// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "owfsim/metrics.hpp"
#include "owfsim/sim.hpp"
#include "stiff_bus.hpp"

using namespace owfsim;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct TimedRun {
    RunRecord record;
    Metrics metrics;
    double wall;
};

TimedRun simulate(const ScenarioSpec& spec, SimConfig cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunRecord r = run(spec, cfg);
    const double wall = seconds_since(t0);
    Metrics m = compute_metrics(r);
    return {std::move(r), std::move(m), wall};
}

TimedRun simulate(const ScenarioSpec& spec) { return simulate(spec, SimConfig::for_scenario(spec)); }

// 1 ------------------------------------------------------------------------

Verdict limiter_properties() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double v_floor = ControllerParams{}.v_floor;

    constexpr int kSamples = 200000;
    int clamped = 0;
    int scaled = 0;
    double worst_mag = -1e300, worst_p = -1e300, worst_q = 0.0, worst_angle = 0.0;
    for (int n = 0; n < kSamples; ++n) {
        const SpaceVector v = std::polar(1.5 * unit(rng), 2.0 * kPi * unit(rng));
        const SpaceVector i0 = std::polar(3.0 * unit(rng), 2.0 * kPi * unit(rng));
        const double p_min = n % 10 == 0 ? kNoPowerLimit : -unit(rng);
        const double i_max = 0.2 + 1.8 * unit(rng);

        const SpaceVector ir = limit_reverse_power(i0, v, p_min, v_floor);
        const SpaceVector i = limit_current_magnitude(ir, i_max);
        if (ir != i0) ++clamped;
        if (i != ir) ++scaled;

        worst_mag = std::max(worst_mag, std::abs(i) - i_max);
        if (std::abs(v) > v_floor && p_min > kNoPowerLimit) worst_p = std::max(worst_p, p_min - complex_power(v, i).p);
        worst_q = std::max(worst_q, std::abs(complex_power(v, ir).q - complex_power(v, i0).q));
        if (std::abs(ir) > 0.0 && std::abs(i) > 0.0) {
            const SpaceVector rel = i * std::conj(ir) / (std::abs(i) * std::abs(ir));
            worst_angle = std::max(worst_angle, std::abs(std::arg(rel)));
        }
    }
    const double wall = seconds_since(t0);
    const bool pass = worst_mag <= 1e-12 && worst_p <= 1e-12 && worst_q <= 1e-12 && worst_angle <= 1e-12 &&
                      wall < 5.0 && clamped > 0 && scaled > 0;
    return {pass, fmt("%d samples (%d projected, %d scaled); max |i|-I_max %.2e, max P_min-P %.2e, "
                      "max dQ %.2e, max angle %.2e rad; %.2f s",
                      kSamples, clamped, scaled, worst_mag, worst_p, worst_q, worst_angle, wall)};
}

// 2 ------------------------------------------------------------------------

Verdict virtual_equals_measured() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_p = 0.0, worst_q = 0.0;
    std::string points;
    for (const ControllerReferences refs : {ControllerReferences{0.5, 0.0, 1.0}, ControllerReferences{0.8, 0.2, 1.0}}) {
        testing::StiffBus setup;
        setup.params = testing::wide_limits();
        setup.refs = refs;
        setup.t_end = 3.0;
        const auto trace = testing::run_stiff_bus(setup);
        for (const auto& s : trace) {
            if (s.t < setup.t_end - 0.5) continue;
            worst_p = std::max(worst_p, std::abs(s.signals.p_virt - s.signals.p));
            worst_q = std::max(worst_q, std::abs(s.signals.q_virt - s.signals.q));
        }
        const auto& end = trace.back().signals;
        points += fmt(" [P_ref %.1f Q_ref %.1f: P %.4f Q %.4f]", refs.p_ref, refs.q_ref, end.p, end.q);
    }
    const double wall = seconds_since(t0);
    return {worst_p < 1e-3 && worst_q < 1e-3 && wall < 10.0,
            fmt("max |P_virt-P| %.2e, max |Q_virt-Q| %.2e over the last 0.5 s;%s %.2f s", worst_p, worst_q,
                points.c_str(), wall)};
}

// 3 ------------------------------------------------------------------------

Verdict droop_statics() {
    // Open loop: sync and voltage-reference maps driven by constant errors.
    const ControllerParams p;
    ControllerState s = make_controller_state(p);
    const double dp = 0.05;
    double omega = p.omega_1;
    for (int k = 0; k < 30000; ++k) omega = sync_step(s, 0.5, 0.5 - dp, p, p.ts).omega;
    const double err_f_open = std::abs((omega - p.omega_1) - dp / p.k_m);

    ControllerParams pq = p;
    pq.k_pv_i = 0.0;
    ControllerState sq = make_controller_state(pq);
    const double dq = 0.3;
    double v_ref = 0.0;
    for (int k = 0; k < 30000; ++k) v_ref = voltage_ref_step(sq, 0.8, 0.1, 0.1 - dq, 0.4, 0.4, pq, pq.ts);
    const double err_q_open = std::abs((v_ref - 0.8) - pq.k_qv * dq);

    // Closed loop on a stiff bus. The PV integral is disabled: against an
    // infinite bus it would fight the frequency droop for the same power.
    testing::StiffBus freq;
    freq.params = testing::wide_limits();
    freq.params.k_pv_i = 0.0;
    freq.refs = {0.5, 0.0, 1.0};
    freq.omega_grid = 1.002;
    freq.t_end = 4.0;
    const ControlSignals f = testing::run_stiff_bus(freq).back().signals;
    const double err_f_closed = std::abs((f.omega - 1.0) - (f.p_ref - f.feedback.p_sync) / freq.params.k_m);
    const double err_f_grid = std::abs(f.omega - freq.omega_grid);

    testing::StiffBus volt;
    volt.params = testing::wide_limits();
    volt.params.k_pv_i = 0.0;
    volt.refs = {0.5, 0.0, 1.02};
    volt.t_end = 4.0;
    const ControlSignals q = testing::run_stiff_bus(volt).back().signals;
    const double pv = volt.params.k_pv * (q.p_ref - q.feedback.p_pv);
    const double err_q_closed = std::abs((q.v_ref - q.v_ext - pv) - volt.params.k_qv * (q.q_ref - q.feedback.q_qv));

    const double worst = std::max({err_f_open, err_q_open, err_f_closed, err_q_closed});
    return {worst < 1e-4 && err_f_grid < 1e-4,
            fmt("open loop: |dw - dP/km| %.1e, |dV - K_QV dQ| %.1e; stiff bus at 1.002 pu: w %.6f, "
                "|dw - dP/km| %.1e; stiff bus with V_ext 1.02: Q %.4f, |dV - K_QV dQ| %.1e",
                err_f_open, err_q_open, f.omega, err_f_closed, q.q, err_q_closed)};
}

// 4, 10 ---------------------------------------------------------------------

Verdict black_start_virtual(const TimedRun& r) {
    const Metrics& m = r.metrics;
    const double bound = 1.2 * 1.02;
    const auto& t = r.record.column("t");
    const bool completed = !m.diverged && t.back() >= r.record.scenario.t_end - 1e-9;
    bool in_band = m.voltage_settled;
    double i_peak = 0.0;
    for (const auto& s : m.strings) {
        in_band = in_band && std::abs(s.final_voltage - 0.8) <= 0.02;
        i_peak = std::max(i_peak, s.max_current);
    }
    const bool pass = completed && in_band && !m.los.detected && i_peak <= bound && r.wall < 60.0;
    return {pass, fmt("|v_pcc| settled %.4f / %.4f pu (band held over last %.1f s: %s), LOS %s, max |i| %.4f pu "
                      "(bound %.3f), t_end %.1f s, %.1f s wall",
                      m.strings[0].final_voltage, m.strings[1].final_voltage, r.record.scenario.settle_window,
                      m.voltage_settled ? "yes" : "no", m.los.detected ? "yes" : "no", i_peak, bound, t.back(),
                      r.wall)};
}

Verdict dt_convergence(const TimedRun& coarse) {
    const ScenarioSpec spec = build_preset("blackstart-virtual");
    SimConfig cfg = SimConfig::for_scenario(spec);
    cfg.dt_plant /= 2.0;
    const TimedRun fine = simulate(spec, cfg);
    double worst = 0.0;
    std::string values;
    for (std::size_t k = 0; k < spec.strings.size(); ++k) {
        const double a = coarse.record.string_signal(k, "vpcc").back();
        const double b = fine.record.string_signal(k, "vpcc").back();
        worst = std::max(worst, std::abs(a - b));
        values += fmt(" s%zu %.6f -> %.6f;", k + 1, a, b);
    }
    return {!fine.record.diverged() && worst < 1e-4,
            fmt("terminal |v_pcc| at dt 20 us -> 10 us:%s max change %.2e pu", values.c_str(), worst)};
}

// 5 ------------------------------------------------------------------------

Verdict black_start_measured(const TimedRun& r) {
    const Metrics& m = r.metrics;
    const bool pass = (m.los.detected || m.diverged) && r.wall < 60.0;
    std::string when = m.los.detected ? fmt("LOS at %.3f s", m.los.time) : std::string("no LOS");
    if (m.diverged) when += fmt(", diverged at %.3f s", m.diverged_at);
    return {pass, fmt("%s (t_end %.1f s), max |w-1| %.3f / %.3f pu, %.1f s wall", when.c_str(),
                      r.record.scenario.t_end, m.strings[0].max_freq_dev, m.strings[1].max_freq_dev, r.wall)};
}

// 6, 7, 8 ---------------------------------------------------------------------

Verdict ramp_nopmin_measured(const TimedRun& r) {
    const Metrics& m = r.metrics;
    return {m.ramp_completed && m.reactive_imbalance < 0.05,
            fmt("ramp completed %s, P %.4f / %.4f pu, reactive imbalance %.4f pu, LOS %s", m.ramp_completed ? "yes" : "no",
                m.strings[0].final_power, m.strings[1].final_power, m.reactive_imbalance,
                m.los.detected ? "yes" : "no")};
}

Verdict ramp_pmin_measured_pv(const TimedRun& r) {
    const Metrics& m = r.metrics;
    const StringMetrics& w1 = m.strings[0];
    const bool pass = w1.current_limit_sustained || m.los.detected || m.diverged;
    std::string flags;
    if (w1.current_limit_sustained) flags += fmt(" WTS1 current limit held %.3f s;", w1.longest_current_limit);
    if (m.los.detected) flags += fmt(" LOS at %.3f s;", m.los.time);
    if (m.diverged) flags += fmt(" diverged at %.3f s;", m.diverged_at);
    if (flags.empty()) flags = " none;";
    return {pass, fmt("flags:%s ramp completed %s", flags.c_str(), m.ramp_completed ? "yes" : "no")};
}

Verdict ramp_pmin_virtual(const TimedRun& r) {
    const Metrics& m = r.metrics;
    const ScenarioSpec& spec = r.record.scenario;
    const double window_start = spec.p_ref.start;
    const double window_end = spec.p_ref.start + spec.strings[1].p_ref_delay;
    const auto& t = r.record.column("t");
    const auto& p_virt2 = r.record.string_signal(1, "p_virt");
    double min_virt_window = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= window_start && t[i] <= window_end) min_virt_window = std::min(min_virt_window, p_virt2[i]);
    const double min_p = std::min(m.strings[0].min_power, m.strings[1].min_power);
    const double p_min = spec.strings[1].controller.p_min;

    const bool pass = m.ramp_completed && !m.los.detected && m.reactive_imbalance < 0.05 && min_virt_window < 0.0 &&
                      min_p >= p_min - 0.02;
    return {pass, fmt("ramp completed %s, LOS %s, reactive imbalance %.4f pu, WTS2 min P_virt in [%.1f, %.1f] s "
                      "%.4f pu, min measured P %.4f pu",
                      m.ramp_completed ? "yes" : "no", m.los.detected ? "yes" : "no", m.reactive_imbalance,
                      window_start, window_end, min_virt_window, min_p)};
}

// 9 ------------------------------------------------------------------------

Verdict symmetry_baseline() {
    double worst = 0.0;
    int runs = 0;
    int los = 0;
    for (int mask = 0; mask < 8; ++mask) {
        const FeedbackConfig cfg{(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0};
        for (const ScenarioSpec& spec : {build_black_start(0.0, cfg), build_power_ramp(0.0, 0.0, cfg)}) {
            const RunRecord r = run(spec, SimConfig::for_scenario(spec));
            ++runs;
            if (detect_los(r).detected) ++los;
            for (std::string_view sig : kStringSignals) {
                const auto& a = r.string_signal(0, sig);
                const auto& b = r.string_signal(1, sig);
                for (std::size_t i = 0; i < a.size(); ++i) {
                    const double d = std::abs(a[i] - b[i]);
                    worst = std::max(worst, std::isnan(d) ? INFINITY : d);
                }
            }
        }
    }
    return {worst < 1e-9 && los == 0,
            fmt("%d runs (8 feedback configurations x black start and power ramp), max per-string difference "
                "%.2e pu, runs with LOS %d",
                runs, worst, los)};
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    int failures = 0;
    auto report = [&](int id, const char* title, const Verdict& v) {
        std::printf("criterion %2d %s  %s: %s\n", id, v.pass ? "PASS" : "FAIL", title, v.detail.c_str());
        std::fflush(stdout);
        if (!v.pass) ++failures;
    };

    report(1, "limiter property suite", limiter_properties());
    report(2, "virtual equals measured on a stiff bus", virtual_equals_measured());
    report(3, "droop statics", droop_statics());

    const TimedRun bs_virtual = simulate(build_preset("blackstart-virtual"));
    report(4, "black start, 300 ms delay, all-virtual", black_start_virtual(bs_virtual));
    report(5, "black start, 300 ms delay, QV and PV measured",
           black_start_measured(simulate(build_preset("blackstart-measured-droop"))));
    report(6, "power ramp, no P_min, all-measured", ramp_nopmin_measured(simulate(build_preset("ramp-nopmin-measured"))));
    report(7, "power ramp, P_min = 0, PV measured", ramp_pmin_measured_pv(simulate(build_preset("ramp-pmin-measured-pv"))));
    report(8, "power ramp, P_min = 0, all-virtual", ramp_pmin_virtual(simulate(build_preset("ramp-pmin-virtual"))));
    report(9, "zero-delay symmetry baseline", symmetry_baseline());
    report(10, "dt convergence of the black start", dt_convergence(bs_virtual));

    std::printf("%d of 10 criteria passed in %.1f s\n", 10 - failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
