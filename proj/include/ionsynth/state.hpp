#pragma once

// Joint motional (truncated Fock) x internal (two-level) state of one ion and
// the exact closed-form pulse operators acting on it.
//
// Layout: amplitude of |m>|s> lives at index 2*m + s with s = 0 for |g> and
// s = 1 for |e>. This ordering is also the serialized order.

#include <span>
#include <string>
#include <vector>

#include "ionsynth/physics.hpp"

namespace ionsynth {

enum class Internal : int { g = 0, e = 1 };

inline constexpr std::size_t joint_index(int m, Internal s) noexcept {
    return 2 * static_cast<std::size_t>(m) + static_cast<std::size_t>(s);
}

/// Amplitudes below this magnitude count as zero for the truncation guard.
inline constexpr double kGuardTolerance = 1e-12;
/// Allowed deviation of the squared norm from one.
inline constexpr double kNormTolerance = 1e-12;

class JointState {
public:
    /// |0>|g> in a space of fock_dim motional levels.
    static JointState ground(int fock_dim);
    static JointState basis(int fock_dim, int m, Internal s);
    /// Validates even length and unit norm (within kNormTolerance).
    static JointState from_amplitudes(std::vector<complex> amplitudes);
    /// Rescales to unit norm; throws DomainError for a zero vector.
    static JointState normalized(std::vector<complex> amplitudes);

    int dim() const noexcept { return static_cast<int>(amplitudes_.size() / 2); }
    std::span<const complex> amplitudes() const noexcept { return amplitudes_; }
    complex amplitude(int m, Internal s) const { return amplitudes_.at(joint_index(m, s)); }
    double population(int m, Internal s) const { return std::norm(amplitude(m, s)); }
    double norm_squared() const noexcept;

    /// Same state multiplied by a global phase factor.
    JointState with_global_phase(double phase) const;

private:
    explicit JointState(std::vector<complex> amplitudes) : amplitudes_(std::move(amplitudes)) {}
    std::vector<complex> amplitudes_;
};

struct Pulse {
    SidebandKind kind = SidebandKind::carrier;
    int order = 0;         // 0 for the carrier, >= 1 for sidebands
    double phase = 0.0;    // laser initial phase, radians in [0, 2pi)
    double duration = 0.0; // seconds

    static Pulse carrier(double phase, double duration);
    static Pulse red(int order, double phase, double duration);
    static Pulse blue(int order, double phase, double duration);

    /// Throws DomainError when kind and order disagree or duration is negative.
    void validate() const;
    bool operator==(const Pulse&) const = default;
};

struct PulseSchedule {
    PhysicalParams params;
    std::vector<Pulse> pulses;
    std::string provenance;

    double total_duration() const noexcept;
    void validate() const;
    bool operator==(const PulseSchedule&) const = default;
};

/// Apply one pulse to a raw amplitude vector (need not be normalized; the
/// operator is linear). Throws TruncationError when amplitude sits on a level
/// the pulse would raise past the truncation.
void apply_pulse_in_place(std::span<complex> amplitudes, const PhysicalParams& params,
                          const Pulse& pulse);

/// Per-level rotation of |m>|g>, |m>|e> by the conditional carrier.
JointState apply_carrier(const JointState& state, const PhysicalParams& params, double phase,
                         double duration);
/// kth red sideband: |m+k>|g> <-> |m>|e>, rate Omega_{m,k}.
JointState apply_red(const JointState& state, const PhysicalParams& params, int order,
                     double phase, double duration);
/// kth blue sideband: |m>|g> <-> |m+k>|e>, rate Omega_{m,k}.
JointState apply_blue(const JointState& state, const PhysicalParams& params, int order,
                      double phase, double duration);
JointState apply_pulse(const JointState& state, const PhysicalParams& params, const Pulse& pulse);

/// Applies the pulses left to right. When trace is non-null it receives the
/// state after every pulse. Truncation errors carry the offending pulse index.
JointState run_schedule(const JointState& initial, const PulseSchedule& schedule,
                        std::vector<JointState>* trace = nullptr);

enum class FidelityMode { up_to_global_phase, exact_phase };

/// |<a|b>|^2, or max(0, Re<a|b>)^2 for exact_phase.
double fidelity(const JointState& a, const JointState& b,
                FidelityMode mode = FidelityMode::up_to_global_phase);

complex inner_product(const JointState& a, const JointState& b);

/// Euclidean distance between the amplitude vectors.
double state_distance(const JointState& a, const JointState& b);

}  // namespace ionsynth
