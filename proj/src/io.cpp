#include "ionsynth/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ionsynth/errors.hpp"

namespace ionsynth {

namespace {

template <typename T>
T field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) {
        throw InputError(std::string("missing field \"") + name + "\"");
    }
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("field \"") + name + "\": " + e.what());
    }
}

template <typename T>
T field_or(const json& j, const char* name, T fallback) {
    return j.contains(name) ? field<T>(j, name) : fallback;
}

SidebandKind kind_from_string(const std::string& s) {
    if (s == "carrier") return SidebandKind::carrier;
    if (s == "red") return SidebandKind::red;
    if (s == "blue") return SidebandKind::blue;
    throw InputError("unknown pulse kind \"" + s + "\"");
}

json amplitudes_to_json(std::span<const complex> amps) {
    json out = json::array();
    for (const auto& a : amps) out.push_back(complex_to_json(a));
    return out;
}

std::vector<complex> amplitudes_from_json(const json& j) {
    if (!j.is_array()) throw InputError("amplitudes must be an array of [re, im] pairs");
    std::vector<complex> out;
    for (const auto& item : j) out.push_back(complex_from_json(item));
    return out;
}

json timed_phase_to_json(const TimedPhase& p) {
    return {{"duration_s", p.duration}, {"phase_rad", p.phase}};
}

TimedPhase timed_phase_from_json(const json& j) {
    return {field<double>(j, "duration_s"), field_or<double>(j, "phase_rad", 0.0)};
}

const char* strategy_name(FockStrategy s) {
    return s == FockStrategy::blue_then_carrier ? "blue_then_carrier" : "carrier_then_red";
}

}  // namespace

json complex_to_json(complex z) { return json::array({z.real(), z.imag()}); }

complex complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw InputError("complex numbers must be [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const PhysicalParams& p) {
    return {{"eta", p.eta},
            {"omega_carrier_rad_s", p.omega_carrier},
            {"fock_dim", p.fock_dim},
            {"trap_freq_rad_s", p.trap_freq},
            {"atomic_freq_rad_s", p.atomic_freq}};
}

PhysicalParams params_from_json(const json& j) {
    PhysicalParams p;
    p.eta = field<double>(j, "eta");
    p.omega_carrier = field<double>(j, "omega_carrier_rad_s");
    p.fock_dim = field<int>(j, "fock_dim");
    p.trap_freq = field_or<double>(j, "trap_freq_rad_s", p.trap_freq);
    p.atomic_freq = field_or<double>(j, "atomic_freq_rad_s", p.atomic_freq);
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw InputError(std::string("params: ") + e.what());
    }
    return p;
}

json to_json(const Pulse& pulse) {
    return {{"kind", to_string(pulse.kind)},
            {"k", pulse.order},
            {"phase_rad", pulse.phase},
            {"duration_s", pulse.duration}};
}

Pulse pulse_from_json(const json& j) {
    // wrap_phase is the identity on [0, 2pi), so written schedules round-trip exactly.
    Pulse p{kind_from_string(field<std::string>(j, "kind")), field<int>(j, "k"),
            wrap_phase(field<double>(j, "phase_rad")), field<double>(j, "duration_s")};
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw InputError(std::string("pulse: ") + e.what());
    }
    return p;
}

json to_json(const PulseSchedule& s) {
    json pulses = json::array();
    for (const auto& p : s.pulses) pulses.push_back(to_json(p));
    return {{"params", to_json(s.params)}, {"pulses", pulses}, {"provenance", s.provenance}};
}

PulseSchedule schedule_from_json(const json& j) {
    PulseSchedule s;
    s.params = params_from_json(field<json>(j, "params"));
    const json pulses = field<json>(j, "pulses");
    if (!pulses.is_array()) throw InputError("\"pulses\" must be an array");
    for (const auto& p : pulses) s.pulses.push_back(pulse_from_json(p));
    s.provenance = field_or<std::string>(j, "provenance", "");
    return s;
}

json to_json(const TargetState& target) {
    struct {
        json operator()(const FockTarget& t) const {
            return {{"variant", "fock"}, {"n", t.n}, {"strategy", strategy_name(t.strategy)}};
        }
        json operator()(const SuperpositionTarget& t) const {
            return {{"variant", "superposition"},
                    {"amplitudes", amplitudes_to_json(t.amplitudes)},
                    {"sideband", to_string(t.sideband)},
                    {"restore_ground", t.restore_ground}};
        }
        json operator()(const PhaseStateTarget& t) const {
            return {{"variant", "phase_state"}, {"N", t.N}, {"theta", t.theta}};
        }
        json operator()(const CoherentTarget& t) const {
            return {{"variant", "coherent"}, {"alpha", complex_to_json(t.alpha)}, {"N", t.N}};
        }
        json operator()(const ParityCoherentTarget& t) const {
            return {{"variant", t.parity == Parity::even ? "even_coherent" : "odd_coherent"},
                    {"alpha", complex_to_json(t.alpha)},
                    {"N", t.N}};
        }
        json operator()(const BellTarget&) const { return {{"variant", "bell"}}; }
        json operator()(const EntangledCarrierTarget& t) const {
            return {{"variant", "entangled_carrier"},
                    {"amplitudes", amplitudes_to_json(t.amplitudes)},
                    {"carrier_duration_s", t.carrier_duration},
                    {"carrier_phase_rad", t.carrier_phase}};
        }
        json operator()(const AlternatingTarget& t) const {
            json pulses = json::array();
            for (const auto& p : t.sideband_pulses) pulses.push_back(timed_phase_to_json(p));
            return {{"variant", "alternating"},
                    {"carrier", timed_phase_to_json(t.carrier)},
                    {"sideband_pulses", pulses}};
        }
    } visitor;
    return std::visit(visitor, target);
}

TargetState target_from_json(const json& j) {
    const auto variant = field<std::string>(j, "variant");
    if (variant == "fock") {
        const auto strategy = field_or<std::string>(j, "strategy", "blue_then_carrier");
        if (strategy != "blue_then_carrier" && strategy != "carrier_then_red") {
            throw InputError("unknown Fock strategy \"" + strategy + "\"");
        }
        return FockTarget{field<int>(j, "n"), strategy == "blue_then_carrier"
                                                  ? FockStrategy::blue_then_carrier
                                                  : FockStrategy::carrier_then_red};
    }
    if (variant == "superposition") {
        const auto sideband = kind_from_string(field_or<std::string>(j, "sideband", "red"));
        if (sideband == SidebandKind::carrier) throw InputError("superposition sideband must be red or blue");
        return SuperpositionTarget{amplitudes_from_json(field<json>(j, "amplitudes")), sideband,
                                   field_or<bool>(j, "restore_ground", false)};
    }
    if (variant == "phase_state") {
        return PhaseStateTarget{field<int>(j, "N"), field<double>(j, "theta")};
    }
    if (variant == "coherent") {
        return CoherentTarget{complex_from_json(field<json>(j, "alpha")), field<int>(j, "N")};
    }
    if (variant == "even_coherent" || variant == "odd_coherent") {
        return ParityCoherentTarget{complex_from_json(field<json>(j, "alpha")), field<int>(j, "N"),
                                    variant == "even_coherent" ? Parity::even : Parity::odd};
    }
    if (variant == "bell") return BellTarget{};
    if (variant == "entangled_carrier") {
        return EntangledCarrierTarget{amplitudes_from_json(field<json>(j, "amplitudes")),
                                      field<double>(j, "carrier_duration_s"),
                                      field_or<double>(j, "carrier_phase_rad", 0.0)};
    }
    if (variant == "alternating") {
        AlternatingTarget t;
        t.carrier = timed_phase_from_json(field<json>(j, "carrier"));
        const json pulses = field<json>(j, "sideband_pulses");
        if (!pulses.is_array()) throw InputError("\"sideband_pulses\" must be an array");
        for (const auto& p : pulses) t.sideband_pulses.push_back(timed_phase_from_json(p));
        return t;
    }
    throw InputError("unknown target variant \"" + variant + "\"");
}

json to_json(const JointState& state) {
    json populations = json::array();
    for (int m = 0; m < state.dim(); ++m) {
        populations.push_back({state.population(m, Internal::g), state.population(m, Internal::e)});
    }
    return {{"fock_dim", state.dim()},
            {"amplitudes", amplitudes_to_json(state.amplitudes())},
            {"populations", populations}};
}

JointState state_from_json(const json& j) {
    auto amps = amplitudes_from_json(field<json>(j, "amplitudes"));
    if (j.contains("fock_dim") && field<int>(j, "fock_dim") * 2 != static_cast<int>(amps.size())) {
        throw InputError("state: fock_dim does not match the number of amplitudes");
    }
    try {
        return JointState::from_amplitudes(std::move(amps));
    } catch (const Error& e) {
        throw InputError(std::string("state: ") + e.what());
    }
}

json to_json(const SynthesisReport& r) {
    json rows = json::array();
    for (const auto& p : r.schedule.pulses) rows.push_back(to_json(p));
    json out = {{"provenance", r.schedule.provenance},
                {"pulses", rows},
                {"pulse_count", r.schedule.pulses.size()},
                {"total_duration_s", r.total_duration_s},
                {"fidelity_vs_target", r.fidelity_vs_target},
                {"exact_phase_fidelity", r.exact_phase_fidelity},
                {"global_phase_rad", r.global_phase},
                {"terminal_internal", r.terminal_internal == Internal::g ? "g" : "e"},
                {"predicted_final", to_json(r.predicted_final)},
                {"target", to_json(r.target)},
                {"notes", r.notes}};
    out["oracle_fidelity"] = r.oracle_fidelity ? json(*r.oracle_fidelity) : json(nullptr);
    if (r.truncation_overlap) out["truncation_overlap"] = *r.truncation_overlap;
    return out;
}

json to_json(const OracleVerification& v) {
    return {{"oracle_fidelity", v.fidelity},
            {"oracle_exact_phase_fidelity", v.exact_phase_fidelity},
            {"hermiticity_residuals", v.hermiticity_residuals},
            {"closed_form_final", to_json(v.closed_form_final)},
            {"oracle_final", to_json(v.oracle_final)}};
}

std::vector<RabiRow> rabi_table(const std::vector<double>& etas, double omega_carrier, int m_max,
                                int k_max) {
    std::vector<RabiRow> rows;
    for (const double eta : etas) {
        PhysicalParams p;
        p.eta = eta;
        p.omega_carrier = omega_carrier;
        p.validate();
        for (int m = 0; m <= m_max; ++m) {
            for (int k = 0; k <= k_max; ++k) {
                const double v = rabi_frequency(p, m, k).value;
                rows.push_back({eta, m, k, v, v / omega_carrier});
            }
        }
    }
    return rows;
}

std::string format_double(double value) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw NumericalError("format_double failed");
    return std::string(buf, end);
}

void write_rabi_csv(std::ostream& out, const std::vector<RabiRow>& rows) {
    out << "eta,m,k,rabi_rad_s,rabi_over_omega\n";
    for (const auto& r : rows) {
        out << format_double(r.eta) << ',' << r.m << ',' << r.k << ','
            << format_double(r.rabi_rad_s) << ',' << format_double(r.rabi_over_omega) << '\n';
    }
}

json to_json(const std::vector<RabiRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"eta", r.eta},
                       {"m", r.m},
                       {"k", r.k},
                       {"rabi_rad_s", r.rabi_rad_s},
                       {"rabi_over_omega", r.rabi_over_omega}});
    }
    return out;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw InputError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw InputError("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

}  // namespace ionsynth
