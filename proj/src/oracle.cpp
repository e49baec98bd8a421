#include "ionsynth/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <cmath>

#include "ionsynth/errors.hpp"

namespace ionsynth {

namespace {

using SparseOp = Eigen::SparseMatrix<complex>;

constexpr double kTermCutoff = 1e-16;
constexpr double kHermitianTolerance = 1e-12;  // relative to max |H|

// Truncated annihilation operator: a|n> = sqrt(n)|n-1>.
SparseOp annihilation(int dim) {
    SparseOp a(dim, dim);
    std::vector<Eigen::Triplet<complex>> entries;
    for (int n = 1; n < dim; ++n) entries.emplace_back(n - 1, n, std::sqrt(double(n)));
    a.setFromTriplets(entries.begin(), entries.end());
    return a;
}

SparseOp identity(int dim) {
    SparseOp id(dim, dim);
    id.setIdentity();
    return id;
}

double max_abs(const SparseOp& op) {
    double m = 0.0;
    for (int col = 0; col < op.outerSize(); ++col) {
        for (SparseOp::InnerIterator it(op, col); it; ++it) m = std::max(m, std::abs(it.value()));
    }
    return m;
}

// Motional operator multiplying sigma_+ (without the e^{-eta^2/2 - i phase} factor):
//   red    sum_j (i eta)^{2j+k} a^dag^j a^{j+k} / (j! (j+k)!)
//   blue   sum_j (i eta)^{2j+k} a^dag^{j+k} a^j / (j! (j+k)!)
//   carrier sum_j (i eta)^{2j}   a^dag^j a^j / (j!)^2
// Each term is a product of the running powers
//   raising_j  = prod (i eta a^dag)/l,  lowering_j = prod (i eta a)/l,
// which keeps the entries bounded for large truncations.
Eigen::MatrixXcd motional_operator(int dim, double eta, SidebandKind kind, int k, int extra_terms,
                                   int& terms_used) {
    const SparseOp a = annihilation(dim);
    const SparseOp a_dag = SparseOp(a.adjoint());
    const complex ieta{0.0, eta};

    // Sideband operator: which ladder carries the extra k powers.
    const bool raise_extra = kind == SidebandKind::blue;
    SparseOp left = identity(dim);   // (i eta a^dag)^{j[+k]} / (j[+k])!
    SparseOp right = identity(dim);  // (i eta a)^{j[+k]} / (j[+k])!
    for (int l = 1; l <= k; ++l) {
        if (raise_extra) {
            left = SparseOp((ieta / double(l)) * (a_dag * left));
        } else {
            right = SparseOp((ieta / double(l)) * (right * a));
        }
    }

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
    // Once j+1 > eta^2 (dim-1) every matrix element decreases from term to term.
    const double peak = eta * eta * (dim - 1);
    int converged_at = -1;
    terms_used = 0;
    for (int j = 0; j < dim; ++j) {
        if (j > 0) {
            const int left_index = raise_extra ? j + k : j;
            const int right_index = raise_extra ? j : j + k;
            left = SparseOp((ieta / double(left_index)) * (a_dag * left));
            right = SparseOp((ieta / double(right_index)) * (right * a));
        }
        const SparseOp term = left * right;
        sum += Eigen::MatrixXcd(term);
        ++terms_used;
        const double size = max_abs(term);
        if (converged_at < 0 && (j + 1) > peak && size < kTermCutoff) converged_at = j;
        if (converged_at >= 0 && j >= converged_at + extra_terms) break;
    }
    return sum;
}

}  // namespace

HamiltonianMatrix build_hamiltonian(const PhysicalParams& params, SidebandKind kind, int order,
                                    double phase, HamiltonianOptions options) {
    params.validate();
    const int k = kind == SidebandKind::carrier ? 0 : order;
    if (kind != SidebandKind::carrier && k < 1) throw DomainError("sideband order must be >= 1");
    const int dim = params.fock_dim;
    if (k >= dim) throw TruncationError("build_hamiltonian: order exceeds truncation");

    int terms = 0;
    const Eigen::MatrixXcd motional = motional_operator(dim, params.eta, kind, k, options.extra_terms, terms);
    const complex prefactor = 0.5 * params.omega_carrier *
                              std::exp(-0.5 * params.eta * params.eta) * std::polar(1.0, -phase);

    // H = prefactor sigma_+ (x) motional + h.c., with sigma_+ = |e><g|.
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * dim, 2 * dim);
    for (int m = 0; m < dim; ++m) {
        for (int n = 0; n < dim; ++n) {
            const complex v = prefactor * motional(m, n);
            if (v == complex{}) continue;
            const auto row = static_cast<Eigen::Index>(joint_index(m, Internal::e));
            const auto col = static_cast<Eigen::Index>(joint_index(n, Internal::g));
            h(row, col) += v;
            h(col, row) += std::conj(v);
        }
    }
    return HamiltonianMatrix{std::move(h), kind, k, phase, terms};
}

double hermiticity_residual(const Eigen::MatrixXcd& h) {
    return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

JointState propagate(const HamiltonianMatrix& h, const JointState& state, double duration) {
    const auto n = h.entries.rows();
    if (n != h.entries.cols() || n != 2 * static_cast<Eigen::Index>(state.dim())) {
        throw DimensionMismatch("propagate: Hamiltonian and state dimensions differ");
    }
    const double scale = std::max(1.0, h.entries.cwiseAbs().maxCoeff());
    if (hermiticity_residual(h.entries) > kHermitianTolerance * scale) {
        throw DomainError("propagate: Hamiltonian is not Hermitian");
    }
    if (duration == 0.0) return state;

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.entries);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    const auto& v = solver.eigenvectors();
    const Eigen::VectorXcd psi =
        Eigen::Map<const Eigen::VectorXcd>(state.amplitudes().data(), n);
    Eigen::VectorXcd coeffs = v.adjoint() * psi;
    for (Eigen::Index i = 0; i < n; ++i) {
        coeffs(i) *= std::polar(1.0, -solver.eigenvalues()(i) * duration);
    }
    const Eigen::VectorXcd out = v * coeffs;
    return JointState::normalized(std::vector<complex>(out.data(), out.data() + n));
}

double expectation(const HamiltonianMatrix& h, const JointState& state) {
    const auto n = static_cast<Eigen::Index>(state.amplitudes().size());
    const Eigen::VectorXcd psi = Eigen::Map<const Eigen::VectorXcd>(state.amplitudes().data(), n);
    return psi.dot(h.entries * psi).real();
}

OracleVerification verify_schedule(const JointState& initial, const PulseSchedule& schedule) {
    JointState closed = run_schedule(initial, schedule);
    JointState state = initial;
    std::vector<double> residuals;
    for (const auto& pulse : schedule.pulses) {
        const auto h = build_hamiltonian(schedule.params, pulse.kind, pulse.order, pulse.phase);
        residuals.push_back(hermiticity_residual(h.entries));
        state = propagate(h, state, pulse.duration);
    }
    const double f = fidelity(closed, state);
    const double fe = fidelity(closed, state, FidelityMode::exact_phase);
    return OracleVerification{f, fe, std::move(residuals), std::move(closed), std::move(state)};
}

OracleVerification verify_report(SynthesisReport& report) {
    auto result = verify_schedule(JointState::ground(report.schedule.params.fock_dim), report.schedule);
    report.oracle_fidelity = result.fidelity;
    return result;
}

}  // namespace ionsynth
