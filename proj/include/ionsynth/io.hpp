#pragma once

// JSON and CSV surfaces: pulse schedules, target states, joint states,
// synthesis reports and Rabi-frequency tables. Complex numbers are written as
// [re, im] pairs. Number formatting never depends on the locale.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "ionsynth/oracle.hpp"
#include "ionsynth/physics.hpp"
#include "ionsynth/state.hpp"
#include "ionsynth/synthesis.hpp"

namespace ionsynth {

using nlohmann::json;

json to_json(const PhysicalParams& params);
PhysicalParams params_from_json(const json& j);

json to_json(const Pulse& pulse);
Pulse pulse_from_json(const json& j);

json to_json(const PulseSchedule& schedule);
PulseSchedule schedule_from_json(const json& j);

json to_json(const TargetState& target);
TargetState target_from_json(const json& j);

/// {"fock_dim", "amplitudes": [[re, im], ...], "populations": [[p_g, p_e], ...]}
json to_json(const JointState& state);
JointState state_from_json(const json& j);

json to_json(const SynthesisReport& report);
json to_json(const OracleVerification& verification);

json complex_to_json(complex z);
complex complex_from_json(const json& j);

struct RabiRow {
    double eta = 0.0;
    int m = 0;
    int k = 0;
    double rabi_rad_s = 0.0;
    double rabi_over_omega = 0.0;
};

/// Rows for every eta in etas, m in [0, m_max], k in [0, k_max] (empty when a bound is negative).
std::vector<RabiRow> rabi_table(const std::vector<double>& etas, double omega_carrier, int m_max,
                                int k_max);

/// Header "eta,m,k,rabi_rad_s,rabi_over_omega" then one line per row.
void write_rabi_csv(std::ostream& out, const std::vector<RabiRow>& rows);
json to_json(const std::vector<RabiRow>& rows);

/// Shortest round-trip decimal representation, '.' separator.
std::string format_double(double value);

json parse_json(const std::string& text);
std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over path.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace ionsynth
