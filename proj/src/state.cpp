#include "ionsynth/state.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ionsynth/errors.hpp"

namespace ionsynth {

namespace {

void check_dim(int state_dim, const PhysicalParams& params) {
    if (state_dim != params.fock_dim) {
        std::ostringstream msg;
        msg << "state has " << state_dim << " Fock levels, params expect " << params.fock_dim;
        throw DimensionMismatch(msg.str());
    }
}

void check_norm(double norm2) {
    if (!(std::abs(norm2 - 1.0) <= kNormTolerance)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "state is not normalized (norm^2 = " << norm2 << ")";
        throw DomainError(msg.str());
    }
}

void guard(std::span<const complex> amps, int dim, int order, Internal raised,
           SidebandKind kind) {
    for (int m = std::max(0, dim - order); m < dim; ++m) {
        if (std::abs(amps[joint_index(m, raised)]) > kGuardTolerance) {
            std::ostringstream msg;
            msg << to_string(kind) << " sideband of order " << order << " would raise |" << m
                << ">|" << (raised == Internal::g ? 'g' : 'e') << "> past fock_dim " << dim;
            throw TruncationError(msg.str());
        }
    }
}

// Rotates the pair (lower, upper) where coefficient.c is the lower -> upper
// amplitude:  lower' = cos lower + c_tilde upper,  upper' = c lower + cos upper.
void rotate_pair(complex& lower, complex& upper, const PulseCoefficient& coeff) {
    const complex a = lower;
    const complex b = upper;
    lower = coeff.cos_angle * a + coeff.c_tilde * b;
    upper = coeff.c * a + coeff.cos_angle * b;
}

}  // namespace

JointState JointState::ground(int fock_dim) { return basis(fock_dim, 0, Internal::g); }

JointState JointState::basis(int fock_dim, int m, Internal s) {
    if (fock_dim < 1 || m < 0 || m >= fock_dim) throw DomainError("basis state out of range");
    std::vector<complex> amps(2 * static_cast<std::size_t>(fock_dim));
    amps[joint_index(m, s)] = 1.0;
    return JointState(std::move(amps));
}

JointState JointState::from_amplitudes(std::vector<complex> amplitudes) {
    if (amplitudes.empty() || amplitudes.size() % 2 != 0) {
        throw DimensionMismatch("joint state needs a nonzero even number of amplitudes");
    }
    JointState state(std::move(amplitudes));
    check_norm(state.norm_squared());
    return state;
}

JointState JointState::normalized(std::vector<complex> amplitudes) {
    if (amplitudes.empty() || amplitudes.size() % 2 != 0) {
        throw DimensionMismatch("joint state needs a nonzero even number of amplitudes");
    }
    JointState state(std::move(amplitudes));
    const double n = std::sqrt(state.norm_squared());
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("cannot normalize a zero vector");
    for (auto& a : state.amplitudes_) a /= n;
    return state;
}

double JointState::norm_squared() const noexcept {
    return std::accumulate(amplitudes_.begin(), amplitudes_.end(), 0.0,
                           [](double acc, complex a) { return acc + std::norm(a); });
}

JointState JointState::with_global_phase(double phase) const {
    JointState out = *this;
    const complex factor = std::polar(1.0, phase);
    for (auto& a : out.amplitudes_) a *= factor;
    return out;
}

Pulse Pulse::carrier(double phase, double duration) {
    Pulse p{SidebandKind::carrier, 0, wrap_phase(phase), duration};
    p.validate();
    return p;
}

Pulse Pulse::red(int order, double phase, double duration) {
    Pulse p{SidebandKind::red, order, wrap_phase(phase), duration};
    p.validate();
    return p;
}

Pulse Pulse::blue(int order, double phase, double duration) {
    Pulse p{SidebandKind::blue, order, wrap_phase(phase), duration};
    p.validate();
    return p;
}

void Pulse::validate() const {
    if (kind == SidebandKind::carrier && order != 0) {
        throw DomainError("carrier pulse must have order 0");
    }
    if (kind != SidebandKind::carrier && order < 1) {
        throw DomainError("sideband pulse must have order >= 1");
    }
    if (!(duration >= 0.0) || !std::isfinite(duration)) {
        throw DomainError("pulse duration must be finite and nonnegative");
    }
    if (!std::isfinite(phase)) throw DomainError("pulse phase must be finite");
}

double PulseSchedule::total_duration() const noexcept {
    return std::accumulate(pulses.begin(), pulses.end(), 0.0,
                           [](double acc, const Pulse& p) { return acc + p.duration; });
}

void PulseSchedule::validate() const {
    params.validate();
    for (const auto& p : pulses) p.validate();
}

void apply_pulse_in_place(std::span<complex> amps, const PhysicalParams& params,
                          const Pulse& pulse) {
    pulse.validate();
    const int dim = params.fock_dim;
    check_dim(static_cast<int>(amps.size() / 2), params);
    if (pulse.duration == 0.0) return;

    const int k = pulse.order;
    switch (pulse.kind) {
        case SidebandKind::carrier:
            for (int m = 0; m < dim; ++m) {
                const auto coeff = pulse_coefficient(SidebandKind::carrier, 0,
                                                     rabi_frequency(params, m, 0).value,
                                                     pulse.phase, pulse.duration);
                rotate_pair(amps[joint_index(m, Internal::g)], amps[joint_index(m, Internal::e)],
                            coeff);
            }
            break;
        case SidebandKind::red:
            guard(amps, dim, k, Internal::e, pulse.kind);
            // pair (|m>|e>, |m+k>|g>), c moves |m+k>|g> -> |m>|e>
            for (int m = 0; m + k < dim; ++m) {
                const auto coeff = pulse_coefficient(SidebandKind::red, k,
                                                     rabi_frequency(params, m, k).value,
                                                     pulse.phase, pulse.duration);
                rotate_pair(amps[joint_index(m + k, Internal::g)], amps[joint_index(m, Internal::e)],
                            coeff);
            }
            break;
        case SidebandKind::blue:
            guard(amps, dim, k, Internal::g, pulse.kind);
            // pair (|m>|g>, |m+k>|e>), c moves |m>|g> -> |m+k>|e>
            for (int m = 0; m + k < dim; ++m) {
                const auto coeff = pulse_coefficient(SidebandKind::blue, k,
                                                     rabi_frequency(params, m, k).value,
                                                     pulse.phase, pulse.duration);
                rotate_pair(amps[joint_index(m, Internal::g)], amps[joint_index(m + k, Internal::e)],
                            coeff);
            }
            break;
    }
}

JointState apply_pulse(const JointState& state, const PhysicalParams& params,
                       const Pulse& pulse) {
    check_dim(state.dim(), params);
    std::vector<complex> amps(state.amplitudes().begin(), state.amplitudes().end());
    apply_pulse_in_place(amps, params, pulse);
    return JointState::from_amplitudes(std::move(amps));
}

JointState apply_carrier(const JointState& state, const PhysicalParams& params, double phase,
                         double duration) {
    return apply_pulse(state, params, Pulse::carrier(phase, duration));
}

JointState apply_red(const JointState& state, const PhysicalParams& params, int order,
                     double phase, double duration) {
    return apply_pulse(state, params, Pulse::red(order, phase, duration));
}

JointState apply_blue(const JointState& state, const PhysicalParams& params, int order,
                      double phase, double duration) {
    return apply_pulse(state, params, Pulse::blue(order, phase, duration));
}

JointState run_schedule(const JointState& initial, const PulseSchedule& schedule,
                        std::vector<JointState>* trace) {
    schedule.validate();
    JointState state = initial;
    for (std::size_t i = 0; i < schedule.pulses.size(); ++i) {
        try {
            state = apply_pulse(state, schedule.params, schedule.pulses[i]);
        } catch (const TruncationError& e) {
            throw TruncationError("pulse " + std::to_string(i) + ": " + e.what(), i);
        }
        if (trace) trace->push_back(state);
    }
    return state;
}

complex inner_product(const JointState& a, const JointState& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("inner product of states of different dim");
    complex acc{};
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

double fidelity(const JointState& a, const JointState& b, FidelityMode mode) {
    const complex overlap = inner_product(a, b);
    double f = 0.0;
    if (mode == FidelityMode::up_to_global_phase) {
        f = std::norm(overlap);
    } else {
        const double re = std::max(0.0, overlap.real());
        f = re * re;
    }
    return std::clamp(f, 0.0, 1.0);
}

double state_distance(const JointState& a, const JointState& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("distance between states of different dim");
    double acc = 0.0;
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::norm(x[i] - y[i]);
    return std::sqrt(acc);
}

}  // namespace ionsynth
