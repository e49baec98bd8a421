#pragma once

// Single trapped ion driven beyond the Lamb-Dicke regime: physical constants,
// all-orders sideband Rabi frequencies and the coefficients of the three
// closed-form pulse operators (carrier, kth red sideband, kth blue sideband).

#include <complex>
#include <numbers>

namespace ionsynth {

using complex = std::complex<double>;

struct PhysicalParams {
    double eta = 0.25;                                         // Lamb-Dicke parameter
    double omega_carrier = 5.0e4;                              // carrier Rabi frequency, rad/s
    double trap_freq = 2.0 * std::numbers::pi * 135.0e3;       // rad/s, informational
    double atomic_freq = 2.0 * std::numbers::pi * 4.11e14;     // rad/s, informational
    int fock_dim = 16;

    /// Throws DomainError unless eta, omega_carrier are positive finite and fock_dim >= 2.
    void validate() const;

    bool operator==(const PhysicalParams&) const = default;
};

/// Lamb-Dicke parameter of a travelling wave driving the order-th sideband,
/// (omega_0 + sign*order*omega)/c * sqrt(hbar / (2 M omega)). sign is -1 for
/// red, +1 for blue. Compiled schedules never call this; they use the stored eta.
double lamb_dicke_parameter(double ion_mass_kg, double trap_freq, double atomic_freq,
                            int order = 0, int sign = -1);

enum class SidebandKind { carrier, red, blue };

const char* to_string(SidebandKind kind) noexcept;

struct RabiValue {
    int m = 0;
    int k = 0;
    double value = 0.0;  // rad/s
};

/// Omega_{m,k}: rate of the |m>|e> <-> |m+k>|g> (red) or |m>|g> <-> |m+k>|e> (blue)
/// exchange, including every order of eta:
///
///   Omega_{m,k} = (Omega eta^k / 2) sqrt((m+k)!/m!) e^{-eta^2/2}
///                 * sum_{j=0}^{m} (i eta)^{2j} C(m, j) / (j+k)!
///
/// which equals (Omega/2) e^{-eta^2/2} eta^k sqrt(m!/(m+k)!) L_m^k(eta^2).
/// The value is signed: it changes sign where L_m^k(eta^2) crosses zero, which
/// happens for larger m at moderate eta. Omega_{0,k} is always positive.
///
/// Throws DomainError for negative indices and UnderflowError when the magnitude
/// is below the smallest normal double.
RabiValue rabi_frequency(const PhysicalParams& params, int m, int k);

/// Amplitudes of one 2x2 block of a pulse operator. c is the forward
/// transition amplitude, c_tilde = -conj(c) the back transition.
struct PulseCoefficient {
    complex c;
    complex c_tilde;
    double cos_angle = 1.0;  // cos(Omega_{m,k} t), the block's diagonal entry
};

/// Coefficient of the block labelled by Fock index m (the lower Fock level of
/// the coupled pair for sidebands):
///   red/blue: c = i^{k-1} e^{-i phase} sin(Omega_{m,k} t)
///   carrier:  c = -i e^{-i phase} sin(Omega_{m,0} t)
/// order is ignored for the carrier.
PulseCoefficient pulse_coefficient(const PhysicalParams& params, SidebandKind kind, int order,
                                   int m, double phase, double duration);

/// Same as above with a precomputed Rabi frequency.
PulseCoefficient pulse_coefficient(SidebandKind kind, int order, double rabi, double phase,
                                   double duration);

/// Phase in [0, 2pi) for which pulse_coefficient produces a c with the same
/// argument as desired_c. Zero when desired_c == 0.
double phase_for_coefficient(SidebandKind kind, int order, complex desired_c);

enum class DurationBranch { sin_branch, cos_branch };

/// Shortest t >= 0 with |sin(Omega_{m,k} t)| = target (or cos for the
/// cos-branch). Throws DomainError for target outside [0, 1] and when the Rabi
/// frequency is exactly zero but a nontrivial rotation is requested.
double shortest_duration_for(const PhysicalParams& params, SidebandKind kind, int order, int m,
                             double target, DurationBranch branch);

/// Wrap an angle into [0, 2pi).
double wrap_phase(double phase) noexcept;

}  // namespace ionsynth
