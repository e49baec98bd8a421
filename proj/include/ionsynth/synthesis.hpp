#pragma once

// Compilers from target states to laser pulse schedules, starting from the
// motional ground state |0>|g>. Every compiler simulates its own schedule and
// reports the fidelity against the requested target.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ionsynth/physics.hpp"
#include "ionsynth/state.hpp"

namespace ionsynth {

enum class FockStrategy { blue_then_carrier, carrier_then_red };
enum class Parity { even, odd };

struct FockTarget {
    int n = 1;
    FockStrategy strategy = FockStrategy::blue_then_carrier;
};

/// sum_j c_j |j>, built with red sidebands (ends in |g>) or blue sidebands
/// (ends in |e>, optionally returned to |g> for a single Fock level).
struct SuperpositionTarget {
    std::vector<complex> amplitudes;
    SidebandKind sideband = SidebandKind::red;
    bool restore_ground = false;
};

/// Pegg-Barnett phase state (N+1)^{-1/2} sum_j e^{i j theta} |j>.
struct PhaseStateTarget {
    int N = 1;
    double theta = 0.0;
};

/// Coherent state truncated to Fock levels 0..N.
struct CoherentTarget {
    complex alpha;
    int N = 0;
};

struct ParityCoherentTarget {
    complex alpha;
    int N = 0;
    Parity parity = Parity::even;
};

/// (|0>|e> + |1>|g>) / sqrt(2)
struct BellTarget {};

/// A superposition followed by one conditional carrier pulse.
struct EntangledCarrierTarget {
    std::vector<complex> amplitudes;
    double carrier_duration = 0.0;
    double carrier_phase = 0.0;
};

struct TimedPhase {
    double duration = 0.0;
    double phase = 0.0;
};

/// Carrier pulse followed by alternating first red / first blue sideband pulses.
struct AlternatingTarget {
    TimedPhase carrier;
    std::vector<TimedPhase> sideband_pulses;
};

using TargetState =
    std::variant<FockTarget, SuperpositionTarget, PhaseStateTarget, CoherentTarget,
                 ParityCoherentTarget, BellTarget, EntangledCarrierTarget, AlternatingTarget>;

struct SynthesisReport {
    PulseSchedule schedule;
    JointState target;
    JointState predicted_final;
    double fidelity_vs_target = 0.0;        // up to global phase
    double exact_phase_fidelity = 0.0;
    std::optional<double> oracle_fidelity;  // filled by verify_report
    double total_duration_s = 0.0;
    double global_phase = 0.0;  // target amplitudes were multiplied by e^{-i global_phase}
    std::optional<double> truncation_overlap;  // coherent-family targets only
    Internal terminal_internal = Internal::g;
    std::vector<std::string> notes;
};

SynthesisReport compile_fock(int n, const PhysicalParams& params,
                             FockStrategy strategy = FockStrategy::blue_then_carrier);

SynthesisReport compile_superposition(std::span<const complex> amplitudes,
                                      const PhysicalParams& params,
                                      SidebandKind sideband = SidebandKind::red,
                                      bool restore_ground = false);

SynthesisReport compile_phase_state(int N, double theta, const PhysicalParams& params);

SynthesisReport compile_coherent(complex alpha, int N, const PhysicalParams& params);

SynthesisReport compile_even_odd_coherent(complex alpha, int N, Parity parity,
                                          const PhysicalParams& params);

SynthesisReport compile_bell(const PhysicalParams& params);

SynthesisReport compile_entangled_carrier(std::span<const complex> amplitudes,
                                          double carrier_duration, double carrier_phase,
                                          const PhysicalParams& params);

SynthesisReport generate_alternating(TimedPhase carrier, std::span<const TimedPhase> sideband_pulses,
                                     const PhysicalParams& params);

SynthesisReport compile(const TargetState& target, const PhysicalParams& params);

/// Largest target Fock index + 2 * largest sideband order + 2.
int default_fock_dim(const TargetState& target);

/// Carrier and red-sideband durations from the closed-form phase-state timing
/// formula, which replaces Omega_{0,j} by its leading-order value
/// Omega eta^j e^{-eta^2/2} / 2. Shortest branch.
std::vector<double> phase_state_reference_durations(int N, const PhysicalParams& params);

/// Normalized alpha^j / sqrt(j!) for j = 0..N.
std::vector<complex> coherent_amplitudes(complex alpha, int N);

/// Normalized alpha^j / sqrt(j!) restricted to j of the given parity, j <= N.
/// alpha -> 0 gives the lowest allowed level.
std::vector<complex> parity_coherent_amplitudes(complex alpha, int N, Parity parity);

/// Weight of the untruncated (even/odd) coherent state on levels j <= N.
double coherent_truncation_overlap(complex alpha, int N);
double parity_coherent_truncation_overlap(complex alpha, int N, Parity parity);

/// Expected state after a carrier pulse on sum_j c_j |j>|g>:
/// d_j^g = c_j cos(Omega_{j,0} t),  d_j^e = -i c_j e^{-i phase} sin(Omega_{j,0} t).
JointState entangled_carrier_state(std::span<const complex> amplitudes, double carrier_duration,
                                   double carrier_phase, const PhysicalParams& params);

}  // namespace ionsynth
