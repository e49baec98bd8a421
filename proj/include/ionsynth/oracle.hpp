#pragma once

// Independent check of the closed-form pulse operators: the interaction-picture
// Hamiltonian is assembled from truncated ladder-operator matrices and states
// are propagated with exp(-iHt) from a Hermitian eigendecomposition.

#include <Eigen/Dense>
#include <vector>

#include "ionsynth/physics.hpp"
#include "ionsynth/state.hpp"
#include "ionsynth/synthesis.hpp"

namespace ionsynth {

/// H / hbar in rad/s on the 2*fock_dim joint space (same index layout as JointState).
struct HamiltonianMatrix {
    Eigen::MatrixXcd entries;
    SidebandKind kind = SidebandKind::carrier;
    int order = 0;
    double phase = 0.0;
    int series_terms = 0;  // number of (i eta)^{2j} terms summed
};

struct HamiltonianOptions {
    /// Terms summed beyond the point where the series is converged.
    int extra_terms = 0;
};

HamiltonianMatrix build_hamiltonian(const PhysicalParams& params, SidebandKind kind, int order,
                                    double phase, HamiltonianOptions options = {});

/// max |H - H^dagger| over all entries.
double hermiticity_residual(const Eigen::MatrixXcd& h);

/// exp(-i H t) |state>. Throws DomainError if H is not Hermitian.
JointState propagate(const HamiltonianMatrix& h, const JointState& state, double duration);

/// <state| H |state> in rad/s.
double expectation(const HamiltonianMatrix& h, const JointState& state);

struct OracleVerification {
    double fidelity = 0.0;                    // oracle vs closed form, up to global phase
    double exact_phase_fidelity = 0.0;
    std::vector<double> hermiticity_residuals;  // one per pulse
    JointState closed_form_final;
    JointState oracle_final;
};

/// Propagates initial through every pulse with build_hamiltonian + propagate
/// and compares with run_schedule.
OracleVerification verify_schedule(const JointState& initial, const PulseSchedule& schedule);

/// Fills report.oracle_fidelity (starting from |0>|g>). Returns the verification.
OracleVerification verify_report(SynthesisReport& report);

}  // namespace ionsynth
