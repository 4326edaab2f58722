#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "owfsim/record.hpp"
#include "owfsim/scenario.hpp"

namespace owfsim {

namespace {

using nlohmann::json;

constexpr const char* kFormatVersion = "owfsim-run/1";

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

/// Encodes infinities as strings so that they survive JSON.
json number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

/// Reads the fields of one JSON object, rejecting unknown keys.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    ~Reader() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, _] : j_.items())
            if (!seen_.count(key)) fail(path_ + "." + key, "unknown field");
    }

    Reader(const Reader&) = delete;
    Reader& operator=(const Reader&) = delete;

    void read(const char* key, double& dst) {
        const json* v = find(key);
        if (!v) return;
        if (v->is_number()) {
            dst = v->get<double>();
        } else if (v->is_string() && (v->get<std::string>() == "-inf" || v->get<std::string>() == "inf")) {
            dst = v->get<std::string>() == "inf" ? std::numeric_limits<double>::infinity()
                                                : -std::numeric_limits<double>::infinity();
        } else {
            fail(path(key), "expected a number");
        }
    }

    void read(const char* key, int& dst) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_number_integer()) fail(path(key), "expected an integer");
        dst = v->get<int>();
    }

    void read(const char* key, bool& dst) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_boolean()) fail(path(key), "expected true or false");
        dst = v->get<bool>();
    }

    void read(const char* key, std::string& dst) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_string()) fail(path(key), "expected a string");
        dst = v->get<std::string>();
    }

    const json* find(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    [[nodiscard]] std::string path(const std::string& key) const { return path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

json to_json(const ControllerParams& c) {
    return {
        {"k_m", c.k_m},         {"inertia_h", c.inertia_h},   {"t_d", c.t_d},
        {"k_qv", c.k_qv},       {"alpha_q", c.alpha_q},       {"k_pv", c.k_pv},
        {"k_pv_i", c.k_pv_i},   {"alpha_p", c.alpha_p},       {"r_a", c.r_a},
        {"alpha_a", c.alpha_a}, {"alpha_f", c.alpha_f},       {"i_max", c.i_max},
        {"p_min", number(c.p_min)}, {"omega_1", c.omega_1},   {"l_f", c.l_f},
        {"r_f", c.r_f},         {"v_dc", c.v_dc},             {"ts", c.ts},
        {"omega_base", c.omega_base}, {"v_ref_max", c.v_ref_max}, {"v_ref_floor", c.v_ref_floor},
        {"v_floor", c.v_floor},
    };
}

void from_json(const json& j, const std::string& path, ControllerParams& c) {
    Reader r(j, path);
    r.read("k_m", c.k_m);
    r.read("inertia_h", c.inertia_h);
    r.read("t_d", c.t_d);
    r.read("k_qv", c.k_qv);
    r.read("alpha_q", c.alpha_q);
    r.read("k_pv", c.k_pv);
    r.read("k_pv_i", c.k_pv_i);
    r.read("alpha_p", c.alpha_p);
    r.read("r_a", c.r_a);
    r.read("alpha_a", c.alpha_a);
    r.read("alpha_f", c.alpha_f);
    r.read("i_max", c.i_max);
    r.read("p_min", c.p_min);
    r.read("omega_1", c.omega_1);
    r.read("l_f", c.l_f);
    r.read("r_f", c.r_f);
    r.read("v_dc", c.v_dc);
    r.read("ts", c.ts);
    r.read("omega_base", c.omega_base);
    r.read("v_ref_max", c.v_ref_max);
    r.read("v_ref_floor", c.v_ref_floor);
    r.read("v_floor", c.v_floor);
}

json to_json(const FeedbackConfig& f) {
    return {{"sync_uses_virtual", f.sync_uses_virtual},
            {"qv_uses_virtual", f.qv_uses_virtual},
            {"pv_uses_virtual", f.pv_uses_virtual}};
}

void from_json(const json& j, const std::string& path, FeedbackConfig& f) {
    Reader r(j, path);
    r.read("sync_uses_virtual", f.sync_uses_virtual);
    r.read("qv_uses_virtual", f.qv_uses_virtual);
    r.read("pv_uses_virtual", f.pv_uses_virtual);
}

json to_json(const RampProfile& p) { return {{"target", p.target}, {"slope", p.slope}, {"start", p.start}}; }

void from_json(const json& j, const std::string& path, RampProfile& p) {
    Reader r(j, path);
    r.read("target", p.target);
    r.read("slope", p.slope);
    r.read("start", p.start);
}

json to_json(const PlantConfig& p) {
    return {
        {"l_f", p.l_f},
        {"r_f", p.r_f},
        {"cable", {{"r", p.cable.r}, {"l", p.cable.l}, {"c", p.cable.c}}},
        {"c_comp", p.c_comp},
        {"comp_connected", p.comp_connected},
        {"dru",
         {{"k_dru", p.dru.k_dru},
          {"r_comm", p.dru.r_comm},
          {"kappa_q", p.dru.kappa_q},
          {"l_smooth", p.dru.l_smooth},
          {"v_floor", p.dru.v_floor}}},
        {"hvdc", {{"c_off", p.hvdc.c_off}, {"r_dc", p.hvdc.r_dc}, {"l_dc", p.hvdc.l_dc}, {"c_on", p.hvdc.c_on}}},
        {"onshore",
         {{"v_on_ref", p.onshore.v_on_ref},
          {"bandwidth_hz", p.onshore.bandwidth_hz},
          {"ff_bandwidth_hz", p.onshore.ff_bandwidth_hz},
          {"feedforward", p.onshore.feedforward},
          {"energize_allowed", p.onshore.energize_allowed}}},
    };
}

void from_json(const json& j, const std::string& path, PlantConfig& p) {
    Reader r(j, path);
    r.read("l_f", p.l_f);
    r.read("r_f", p.r_f);
    if (const json* c = r.find("cable")) {
        Reader rc(*c, r.path("cable"));
        rc.read("r", p.cable.r);
        rc.read("l", p.cable.l);
        rc.read("c", p.cable.c);
    }
    r.read("c_comp", p.c_comp);
    r.read("comp_connected", p.comp_connected);
    if (const json* d = r.find("dru")) {
        Reader rd(*d, r.path("dru"));
        rd.read("k_dru", p.dru.k_dru);
        rd.read("r_comm", p.dru.r_comm);
        rd.read("kappa_q", p.dru.kappa_q);
        rd.read("l_smooth", p.dru.l_smooth);
        rd.read("v_floor", p.dru.v_floor);
    }
    if (const json* h = r.find("hvdc")) {
        Reader rh(*h, r.path("hvdc"));
        rh.read("c_off", p.hvdc.c_off);
        rh.read("r_dc", p.hvdc.r_dc);
        rh.read("l_dc", p.hvdc.l_dc);
        rh.read("c_on", p.hvdc.c_on);
    }
    if (const json* o = r.find("onshore")) {
        Reader ro(*o, r.path("onshore"));
        ro.read("v_on_ref", p.onshore.v_on_ref);
        ro.read("bandwidth_hz", p.onshore.bandwidth_hz);
        ro.read("ff_bandwidth_hz", p.onshore.ff_bandwidth_hz);
        ro.read("feedforward", p.onshore.feedforward);
        ro.read("energize_allowed", p.onshore.energize_allowed);
    }
}

json to_json(const ScenarioSpec& s) {
    json strings = json::array();
    for (const auto& st : s.strings) {
        strings.push_back({
            {"name", st.name},
            {"n_wt", st.n_wt},
            {"v_ext_delay", st.v_ext_delay},
            {"p_ref_delay", st.p_ref_delay},
            {"feedback", to_json(st.feedback)},
            {"controller", to_json(st.controller)},
        });
    }
    return {
        {"name", s.name},
        {"description", s.description},
        {"strings", strings},
        {"profiles", {{"v_ext", to_json(s.v_ext)}, {"p_ref", to_json(s.p_ref)}, {"q_ref", s.q_ref}}},
        {"plant", to_json(s.plant)},
        {"t_end", s.t_end},
        {"metrics",
         {{"settle_window", s.settle_window},
          {"imbalance_threshold", s.imbalance_threshold},
          {"voltage_band", s.voltage_band},
          {"saturation_hold", s.saturation_hold},
          {"los", {{"freq_dev", s.los.freq_dev}, {"hold", s.los.hold}, {"angle_drift", s.los.angle_drift}}}}},
    };
}

ScenarioSpec scenario_from(const json& j, const std::string& path) {
    ScenarioSpec s;
    Reader r(j, path);
    r.read("name", s.name);
    r.read("description", s.description);
    const json* strings = r.find("strings");
    if (!strings) fail(r.path("strings"), "missing required field");
    if (!strings->is_array()) fail(r.path("strings"), "expected an array");
    for (std::size_t k = 0; k < strings->size(); ++k) {
        const std::string sp = r.path("strings") + "[" + std::to_string(k) + "]";
        StringSpec st;
        Reader rs((*strings)[k], sp);
        rs.read("name", st.name);
        rs.read("n_wt", st.n_wt);
        rs.read("v_ext_delay", st.v_ext_delay);
        rs.read("p_ref_delay", st.p_ref_delay);
        if (const json* f = rs.find("feedback")) from_json(*f, rs.path("feedback"), st.feedback);
        if (const json* c = rs.find("controller")) from_json(*c, rs.path("controller"), st.controller);
        s.strings.push_back(std::move(st));
    }
    if (const json* p = r.find("profiles")) {
        Reader rp(*p, r.path("profiles"));
        if (const json* v = rp.find("v_ext")) from_json(*v, rp.path("v_ext"), s.v_ext);
        if (const json* v = rp.find("p_ref")) from_json(*v, rp.path("p_ref"), s.p_ref);
        rp.read("q_ref", s.q_ref);
    }
    if (const json* p = r.find("plant")) from_json(*p, r.path("plant"), s.plant);
    r.read("t_end", s.t_end);
    if (const json* m = r.find("metrics")) {
        Reader rm(*m, r.path("metrics"));
        rm.read("settle_window", s.settle_window);
        rm.read("imbalance_threshold", s.imbalance_threshold);
        rm.read("voltage_band", s.voltage_band);
        rm.read("saturation_hold", s.saturation_hold);
        if (const json* l = rm.find("los")) {
            Reader rl(*l, rm.path("los"));
            rl.read("freq_dev", s.los.freq_dev);
            rl.read("hold", s.los.hold);
            rl.read("angle_drift", s.los.angle_drift);
        }
    }
    return s;
}

json to_json(const SimConfig& c) {
    return {{"dt_plant", c.dt_plant},
            {"ts_control", c.ts_control},
            {"t_end", c.t_end},
            {"record_decimation", c.record_decimation},
            {"divergence_bound", c.divergence_bound}};
}

SimConfig sim_config_from(const json& j, const std::string& path) {
    SimConfig c;
    Reader r(j, path);
    r.read("dt_plant", c.dt_plant);
    r.read("ts_control", c.ts_control);
    r.read("t_end", c.t_end);
    r.read("record_decimation", c.record_decimation);
    r.read("divergence_bound", c.divergence_bound);
    return c;
}

json to_json(const PerUnitBase& b) {
    return {{"s_base_va", b.s_base}, {"v_base_v", b.v_base}, {"omega_base_rad_s", b.omega_base}};
}

json parse(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
    }
}

}  // namespace

std::string scenario_to_json(const ScenarioSpec& spec, int indent) { return to_json(spec).dump(indent); }

ScenarioSpec scenario_from_json(std::string_view text) {
    ScenarioSpec spec = scenario_from(parse(text), "$");
    spec.validate();
    return spec;
}

std::string sim_config_to_json(const SimConfig& config, int indent) { return to_json(config).dump(indent); }

std::string header_to_json(const RunRecord& record, int indent) {
    json bases = json::array();
    for (const auto& s : record.scenario.strings) {
        const PerUnitBase b = string_base(s.n_wt);
        json entry = to_json(b);
        entry["string"] = s.name;
        entry["n_wt"] = s.n_wt;
        entry["inertia_m_pu"] = s.controller.inertia_m();
        bases.push_back(entry);
    }
    json header = {
        {"format", kFormatVersion},
        {"scenario", to_json(record.scenario)},
        {"sim", to_json(record.config)},
        {"bases",
         {{"strings", bases},
          {"system", to_json(record.scenario.system_base())},
          {"turbine_transformer_va", kTurbineTransformerVA},
          {"turbine_generator_va", kTurbineGeneratorVA},
          {"inertia_convention", "M = 2 H omega_base (normalized time)"},
          {"time", "seconds; controller gains and bandwidths in normalized time"}}},
        {"status", record.diverged() ? "diverged" : "converged"},
        {"columns", record.columns},
    };
    if (record.diverged()) header["diverged_at"] = record.diverged_at;
    return header.dump(indent);
}

void apply_header_json(RunRecord& record, std::string_view text) {
    const json j = parse(text);
    if (!j.is_object() || !j.contains("scenario") || !j.contains("sim"))
        throw std::invalid_argument("header: expected 'scenario' and 'sim' objects");
    record.scenario = scenario_from(j.at("scenario"), "$.scenario");
    record.scenario.validate();
    record.config = sim_config_from(j.at("sim"), "$.sim");
    record.config.validate();
    const std::string status = j.value("status", "converged");
    record.status = status == "diverged" ? RunStatus::Diverged : RunStatus::Converged;
    record.diverged_at = j.value("diverged_at", 0.0);
}

}  // namespace owfsim
