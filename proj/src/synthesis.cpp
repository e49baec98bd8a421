#include "ionsynth/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ionsynth/errors.hpp"

namespace ionsynth {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInputNormTolerance = 1e-12;
constexpr double kRatioSlack = 1e-12;
// Trailing amplitudes at or below this magnitude are dropped.
constexpr double kTrimTolerance = 1e-14;
constexpr double kPhaseStateDurationTolerance = 1e-9;

// Carrier phase used when the carrier opens a red ladder. Makes C^c_0 = -sin.
constexpr double kLadderCarrierPhase = kPi / 2.0;

double rabi(const PhysicalParams& params, int m, int k) {
    return rabi_frequency(params, m, k).value;
}

// Phase giving coefficient c = desired for a pulse whose sin(.) has the sign of rabi.
double solve_phase(SidebandKind kind, int order, complex desired, double rabi_value) {
    return phase_for_coefficient(kind, order, rabi_value < 0.0 ? -desired : desired);
}

void require_dim(const PhysicalParams& params, int highest_level, const char* what) {
    if (params.fock_dim <= highest_level + 1) {
        std::ostringstream msg;
        msg << what << ": fock_dim " << params.fock_dim << " too small, need > "
            << highest_level + 1;
        throw TruncationError(msg.str());
    }
}

std::vector<complex> checked_amplitudes(std::span<const complex> amplitudes) {
    if (amplitudes.empty()) throw InputError("amplitude list is empty");
    double norm2 = 0.0;
    for (const auto& c : amplitudes) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            throw InputError("amplitudes must be finite");
        }
        norm2 += std::norm(c);
    }
    if (std::abs(norm2 - 1.0) > kInputNormTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "amplitudes are not normalized (sum |c_j|^2 = " << norm2 << ")";
        throw InputError(msg.str());
    }
    std::vector<complex> c(amplitudes.begin(), amplitudes.end());
    while (c.size() > 1 && std::abs(c.back()) <= kTrimTolerance) c.pop_back();
    return c;
}

JointState motional_target(std::span<const complex> c, int dim, Internal s) {
    std::vector<complex> amps(2 * static_cast<std::size_t>(dim));
    for (std::size_t j = 0; j < c.size(); ++j) amps[joint_index(static_cast<int>(j), s)] = c[j];
    return JointState::normalized(std::move(amps));
}

SynthesisReport make_report(PulseSchedule schedule, JointState target) {
    JointState final = run_schedule(JointState::ground(schedule.params.fock_dim), schedule);
    const double f = fidelity(target, final);
    const double fe = fidelity(target, final, FidelityMode::exact_phase);
    const double total = schedule.total_duration();
    return SynthesisReport{.schedule = std::move(schedule),
                           .target = std::move(target),
                           .predicted_final = std::move(final),
                           .fidelity_vs_target = f,
                           .exact_phase_fidelity = fe,
                           .oracle_fidelity = std::nullopt,
                           .total_duration_s = total,
                           .global_phase = 0.0,
                           .truncation_overlap = std::nullopt,
                           .terminal_internal = Internal::g,
                           .notes = {}};
}

double ratio_or_throw(double numerator, double denominator, int level) {
    const double ratio = numerator / denominator;
    if (!(ratio <= 1.0 + kRatioSlack)) {
        std::ostringstream msg;
        msg << "weight inversion failed at level " << level << ": |c_j| / residual = " << ratio;
        throw NumericalError(msg.str());
    }
    return std::min(ratio, 1.0);
}

// Carrier on |0>|g> followed by red sidebands of the listed orders. Each red
// pulse of order j moves part of the |0>|e> reservoir to |j>|g>; the last one
// empties it. c must be normalized with c[0] real and nonnegative, and c[j] must
// vanish for every j outside {0} and orders.
std::vector<Pulse> red_ladder(std::span<const complex> c, std::span<const int> orders,
                              const PhysicalParams& params) {
    std::vector<Pulse> pulses;
    const double c0 = std::min(std::abs(c[0]), 1.0);
    const double t0 = shortest_duration_for(params, SidebandKind::carrier, 0, 0, c0,
                                            DurationBranch::cos_branch);
    pulses.push_back(Pulse::carrier(kLadderCarrierPhase, t0));

    // Amplitude currently parked on |0>|e>.
    complex reservoir = pulse_coefficient(params, SidebandKind::carrier, 0, 0,
                                          kLadderCarrierPhase, t0).c;
    for (std::size_t idx = 0; idx < orders.size(); ++idx) {
        const int j = orders[idx];
        const bool last = idx + 1 == orders.size();
        const complex cj = c[static_cast<std::size_t>(j)];
        if (cj == complex{} && !last) {
            pulses.push_back(Pulse::red(j, 0.0, 0.0));
            continue;
        }
        const double ratio = last ? 1.0 : ratio_or_throw(std::abs(cj), std::abs(reservoir), j);
        const double t = shortest_duration_for(params, SidebandKind::red, j, 0, ratio,
                                               DurationBranch::sin_branch);
        // |0>|e> -> cos |0>|e> + c_tilde |j>|g>, so c_tilde = c_j / reservoir.
        const complex c_tilde = cj / reservoir;
        const double phase = solve_phase(SidebandKind::red, j, -std::conj(c_tilde), rabi(params, 0, j));
        pulses.push_back(Pulse::red(j, phase, t));
        reservoir *= std::cos(rabi(params, 0, j) * t);
    }
    return pulses;
}

SynthesisReport compile_red_superposition(std::vector<complex> c, const PhysicalParams& params,
                                          std::string provenance) {
    const int N = static_cast<int>(c.size()) - 1;
    require_dim(params, N, provenance.c_str());
    const JointState target = motional_target(c, params.fock_dim, Internal::g);

    const double global_phase = std::abs(c[0]) > 0.0 ? std::arg(c[0]) : 0.0;
    const complex rotation = std::polar(1.0, -global_phase);
    for (auto& cj : c) cj *= rotation;
    c[0] = std::abs(c[0]);

    std::vector<int> orders;
    for (int j = 1; j <= N; ++j) orders.push_back(j);

    PulseSchedule schedule{params, red_ladder(c, orders, params), std::move(provenance)};
    auto report = make_report(std::move(schedule), target);
    report.global_phase = global_phase;
    return report;
}

SynthesisReport compile_blue_superposition(std::vector<complex> c, const PhysicalParams& params,
                                           bool restore_ground) {
    const int N = static_cast<int>(c.size()) - 1;
    require_dim(params, N, "superposition");

    const auto nonzero = std::count_if(c.begin(), c.end(), [](complex x) { return x != complex{}; });
    const bool single_level = nonzero == 1;
    const bool restore = restore_ground && single_level;

    // Restoring carrier on |N>|e>: amplitude a becomes restore_factor * a on |N>|g>.
    complex restore_factor = 1.0;
    double restore_duration = 0.0;
    double restore_phase = 0.0;
    if (restore) {
        restore_duration = shortest_duration_for(params, SidebandKind::carrier, 0, N, 1.0,
                                                 DurationBranch::sin_branch);
        const double r = rabi(params, N, 0);
        restore_phase = solve_phase(SidebandKind::carrier, 0, complex{-1.0, 0.0}, r);
        restore_factor = pulse_coefficient(SidebandKind::carrier, 0, r, restore_phase,
                                           restore_duration).c_tilde;
    }
    const JointState target =
        motional_target(c, params.fock_dim, restore ? Internal::g : Internal::e);
    for (auto& cj : c) cj /= restore_factor;

    std::vector<Pulse> pulses;
    const double c0 = std::min(std::abs(c[0]), 1.0);
    const double t0 = shortest_duration_for(params, SidebandKind::carrier, 0, 0, c0,
                                            DurationBranch::sin_branch);
    pulses.push_back(
        Pulse::carrier(solve_phase(SidebandKind::carrier, 0, c[0], rabi(params, 0, 0)), t0));
    // Amplitude still on |0>|g>.
    double reservoir = std::cos(rabi(params, 0, 0) * t0);
    for (int j = 1; j <= N; ++j) {
        const bool last = j == N;
        const complex cj = c[static_cast<std::size_t>(j)];
        if (cj == complex{} && !last) {
            pulses.push_back(Pulse::blue(j, 0.0, 0.0));
            continue;
        }
        const double ratio = last ? 1.0 : ratio_or_throw(std::abs(cj), reservoir, j);
        const double t = shortest_duration_for(params, SidebandKind::blue, j, 0, ratio,
                                               DurationBranch::sin_branch);
        // |0>|g> -> cos |0>|g> + c |j>|e>, so c = c_j / reservoir.
        const double phase = solve_phase(SidebandKind::blue, j, cj / reservoir, rabi(params, 0, j));
        pulses.push_back(Pulse::blue(j, phase, t));
        reservoir *= std::cos(rabi(params, 0, j) * t);
    }
    if (restore) pulses.push_back(Pulse::carrier(restore_phase, restore_duration));

    PulseSchedule schedule{params, std::move(pulses), "superposition/blue"};
    auto report = make_report(std::move(schedule), target);
    if (restore) {
        report.notes.push_back("restoring carrier appended on single Fock level");
    } else {
        report.terminal_internal = Internal::e;
        report.notes.push_back("terminates with internal state |e>");
        if (restore_ground) {
            report.notes.push_back(
                "restore_ground ignored: a single carrier cannot return several Fock levels to |g>");
        }
    }
    return report;
}

double power_sum_parity(double x, int j0, int N, bool to_infinity) {
    // sum over j = j0, j0+2, ... of x^j / j!, relative to x^{j0}/j0!
    double term = 1.0;
    double sum = 0.0;
    for (int j = j0;; j += 2) {
        if (!to_infinity && j > N) break;
        sum += term;
        term *= x * x / ((j + 1.0) * (j + 2.0));
        if (to_infinity && j > N && term < 1e-20 * sum) break;
        if (to_infinity && term == 0.0) break;
    }
    return sum;
}

}  // namespace

SynthesisReport compile_fock(int n, const PhysicalParams& params, FockStrategy strategy) {
    params.validate();
    if (n < 0) throw DomainError("compile_fock: n must be nonnegative");
    require_dim(params, n, "compile_fock");
    const JointState target = JointState::basis(params.fock_dim, n, Internal::g);
    if (n == 0) return make_report(PulseSchedule{params, {}, "fock"}, target);

    std::vector<Pulse> pulses;
    if (strategy == FockStrategy::blue_then_carrier) {
        // |0>|g> -> i^{n-1} |n>|e> -> |n>|g>
        const double tb = shortest_duration_for(params, SidebandKind::blue, n, 0, 1.0,
                                                DurationBranch::sin_branch);
        const complex excited = pulse_coefficient(params, SidebandKind::blue, n, 0, 0.0, tb).c;
        const double tc = shortest_duration_for(params, SidebandKind::carrier, 0, n, 1.0,
                                                DurationBranch::sin_branch);
        const complex c_tilde = 1.0 / excited;
        const double phase = solve_phase(SidebandKind::carrier, 0, -std::conj(c_tilde), rabi(params, n, 0));
        pulses = {Pulse::blue(n, 0.0, tb), Pulse::carrier(phase, tc)};
    } else {
        // |0>|g> -> |0>|e> -> |n>|g>
        const double tc = shortest_duration_for(params, SidebandKind::carrier, 0, 0, 1.0,
                                                DurationBranch::sin_branch);
        const double phase_c = solve_phase(SidebandKind::carrier, 0, 1.0, rabi(params, 0, 0));
        const double tr = shortest_duration_for(params, SidebandKind::red, n, 0, 1.0,
                                                DurationBranch::sin_branch);
        const double phase_r = solve_phase(SidebandKind::red, n, -1.0, rabi(params, 0, n));
        pulses = {Pulse::carrier(phase_c, tc), Pulse::red(n, phase_r, tr)};
    }
    return make_report(PulseSchedule{params, std::move(pulses), "fock"}, target);
}

SynthesisReport compile_superposition(std::span<const complex> amplitudes,
                                      const PhysicalParams& params, SidebandKind sideband,
                                      bool restore_ground) {
    params.validate();
    auto c = checked_amplitudes(amplitudes);
    switch (sideband) {
        case SidebandKind::red: return compile_red_superposition(std::move(c), params, "superposition");
        case SidebandKind::blue: return compile_blue_superposition(std::move(c), params, restore_ground);
        default: throw DomainError("compile_superposition: sideband must be red or blue");
    }
}

std::vector<double> phase_state_reference_durations(int N, const PhysicalParams& params) {
    if (N < 1) throw DomainError("phase state needs N >= 1");
    const double eta = params.eta;
    const double scale = 2.0 * std::exp(eta * eta / 2.0) / params.omega_carrier;
    std::vector<double> t;
    t.push_back(scale * std::acos(1.0 / std::sqrt(N + 1.0)));
    for (int j = 1; j <= N; ++j) {
        t.push_back(scale * std::asin(1.0 / std::sqrt(N - j + 1.0)) / std::pow(eta, j));
    }
    return t;
}

SynthesisReport compile_phase_state(int N, double theta, const PhysicalParams& params) {
    params.validate();
    if (N < 1) throw DomainError("compile_phase_state: N must be at least 1");
    std::vector<complex> c;
    for (int j = 0; j <= N; ++j) c.push_back(std::polar(1.0 / std::sqrt(N + 1.0), j * theta));
    auto report = compile_red_superposition(std::move(c), params, "phase_state");

    // The reference formula uses the leading-order Rabi value; compare rotation
    // angles after substituting it.
    const auto reference = phase_state_reference_durations(N, params);
    const double eta = params.eta;
    for (int j = 0; j <= N; ++j) {
        const double leading = 0.5 * params.omega_carrier * std::pow(eta, j) * std::exp(-eta * eta / 2.0);
        const double compiled_angle = report.schedule.pulses[j].duration * rabi(params, 0, j);
        const double reference_angle = reference[j] * leading;
        if (std::abs(compiled_angle - reference_angle) >
            kPhaseStateDurationTolerance * std::abs(reference_angle)) {
            std::ostringstream msg;
            msg << "phase state pulse " << j << " angle " << compiled_angle
                << " disagrees with closed form " << reference_angle;
            throw NumericalError(msg.str());
        }
    }
    return report;
}

std::vector<complex> coherent_amplitudes(complex alpha, int N) {
    if (N < 0) throw DomainError("coherent truncation N must be nonnegative");
    std::vector<complex> c{1.0};
    for (int j = 1; j <= N; ++j) c.push_back(c.back() * alpha / std::sqrt(double(j)));
    double norm2 = 0.0;
    for (const auto& x : c) norm2 += std::norm(x);
    for (auto& x : c) x /= std::sqrt(norm2);
    return c;
}

std::vector<complex> parity_coherent_amplitudes(complex alpha, int N, Parity parity) {
    const int j0 = parity == Parity::even ? 0 : 1;
    if (N < j0) throw DomainError("odd coherent state needs N >= 1");
    std::vector<complex> c(static_cast<std::size_t>(N) + 1);
    c[j0] = 1.0;
    for (int j = j0 + 2; j <= N; j += 2) {
        c[j] = c[j - 2] * alpha * alpha / std::sqrt(double(j) * (j - 1));
    }
    double norm2 = 0.0;
    for (const auto& x : c) norm2 += std::norm(x);
    for (auto& x : c) x /= std::sqrt(norm2);
    return c;
}

double coherent_truncation_overlap(complex alpha, int N) {
    const double x = std::norm(alpha);
    double term = std::exp(-x);
    double sum = 0.0;
    for (int j = 0; j <= N; ++j) {
        sum += term;
        term *= x / (j + 1.0);
    }
    return sum;
}

double parity_coherent_truncation_overlap(complex alpha, int N, Parity parity) {
    const double a = std::abs(alpha);
    const int j0 = parity == Parity::even ? 0 : 1;
    return power_sum_parity(a * a, j0, N, false) / power_sum_parity(a * a, j0, N, true);
}

SynthesisReport compile_coherent(complex alpha, int N, const PhysicalParams& params) {
    params.validate();
    if (N < 0) throw DomainError("compile_coherent: N must be nonnegative");
    require_dim(params, N, "compile_coherent");
    if (alpha == complex{}) {
        auto report = make_report(PulseSchedule{params, {}, "coherent"},
                                  JointState::ground(params.fock_dim));
        report.truncation_overlap = 1.0;
        return report;
    }
    auto report = compile_red_superposition(coherent_amplitudes(alpha, N), params, "coherent");
    report.truncation_overlap = coherent_truncation_overlap(alpha, N);
    return report;
}

SynthesisReport compile_even_odd_coherent(complex alpha, int N, Parity parity,
                                          const PhysicalParams& params) {
    params.validate();
    if (N < 0) throw DomainError("compile_even_odd_coherent: N must be nonnegative");
    require_dim(params, N, "compile_even_odd_coherent");
    auto c = parity_coherent_amplitudes(alpha, N, parity);
    const JointState target = motional_target(c, params.fock_dim, Internal::g);
    const std::string provenance = parity == Parity::even ? "even_coherent" : "odd_coherent";
    const double overlap = parity_coherent_truncation_overlap(alpha, N, parity);

    while (c.size() > 1 && std::abs(c.back()) <= kTrimTolerance) c.pop_back();
    if (c.size() == 1) {
        auto report = make_report(PulseSchedule{params, {}, provenance}, target);
        report.truncation_overlap = overlap;
        return report;
    }
    // Only red sidebands of the chosen parity are used.
    std::vector<int> orders;
    for (int j = parity == Parity::even ? 2 : 1; j < static_cast<int>(c.size()); j += 2) {
        orders.push_back(j);
    }
    const double global_phase = std::abs(c[0]) > 0.0 ? std::arg(c[0]) : 0.0;
    for (auto& x : c) x *= std::polar(1.0, -global_phase);
    c[0] = std::abs(c[0]);

    auto report = make_report(PulseSchedule{params, red_ladder(c, orders, params), provenance}, target);
    report.global_phase = global_phase;
    report.truncation_overlap = overlap;
    return report;
}

SynthesisReport compile_bell(const PhysicalParams& params) {
    params.validate();
    if (params.fock_dim < 3) throw TruncationError("compile_bell: fock_dim must be at least 3");
    // carrier: |0>|g> -> |0>|e>
    const double t0 = shortest_duration_for(params, SidebandKind::carrier, 0, 0, 1.0,
                                            DurationBranch::sin_branch);
    const double phase0 = solve_phase(SidebandKind::carrier, 0, 1.0, rabi(params, 0, 0));
    // red 1: |0>|e> -> (|0>|e> + |1>|g>)/sqrt(2), i.e. c_tilde = 1/sqrt(2)
    const double half = 1.0 / std::sqrt(2.0);
    const double t1 = shortest_duration_for(params, SidebandKind::red, 1, 0, half,
                                            DurationBranch::sin_branch);
    const double phase1 = solve_phase(SidebandKind::red, 1, -half, rabi(params, 0, 1));

    std::vector<complex> amps(2 * static_cast<std::size_t>(params.fock_dim));
    amps[joint_index(0, Internal::e)] = half;
    amps[joint_index(1, Internal::g)] = half;
    return make_report(
        PulseSchedule{params, {Pulse::carrier(phase0, t0), Pulse::red(1, phase1, t1)}, "bell"},
        JointState::normalized(std::move(amps)));
}

JointState entangled_carrier_state(std::span<const complex> amplitudes, double carrier_duration,
                                   double carrier_phase, const PhysicalParams& params) {
    std::vector<complex> amps(2 * static_cast<std::size_t>(params.fock_dim));
    if (static_cast<int>(amplitudes.size()) > params.fock_dim) {
        throw TruncationError("entangled_carrier_state: more amplitudes than Fock levels");
    }
    const complex excite = complex{0.0, -1.0} * std::polar(1.0, -carrier_phase);
    for (std::size_t j = 0; j < amplitudes.size(); ++j) {
        const double angle = rabi(params, static_cast<int>(j), 0) * carrier_duration;
        amps[joint_index(static_cast<int>(j), Internal::g)] = amplitudes[j] * std::cos(angle);
        amps[joint_index(static_cast<int>(j), Internal::e)] = amplitudes[j] * excite * std::sin(angle);
    }
    return JointState::normalized(std::move(amps));
}

SynthesisReport compile_entangled_carrier(std::span<const complex> amplitudes,
                                          double carrier_duration, double carrier_phase,
                                          const PhysicalParams& params) {
    params.validate();
    if (!(carrier_duration >= 0.0)) throw DomainError("carrier duration must be nonnegative");
    auto c = checked_amplitudes(amplitudes);
    auto base = compile_red_superposition(c, params, "entangled_carrier");

    PulseSchedule schedule = base.schedule;
    schedule.pulses.push_back(Pulse::carrier(carrier_phase, carrier_duration));
    auto report = make_report(std::move(schedule),
                              entangled_carrier_state(c, carrier_duration, carrier_phase, params));
    report.global_phase = base.global_phase;
    return report;
}

SynthesisReport generate_alternating(TimedPhase carrier, std::span<const TimedPhase> sideband_pulses,
                                     const PhysicalParams& params) {
    params.validate();
    const int n = static_cast<int>(sideband_pulses.size());
    if (params.fock_dim <= n + 2) {
        std::ostringstream msg;
        msg << "generate_alternating: fock_dim must exceed " << n + 2;
        throw TruncationError(msg.str());
    }
    std::vector<Pulse> pulses{Pulse::carrier(carrier.phase, carrier.duration)};
    for (int i = 0; i < n; ++i) {
        const auto& p = sideband_pulses[static_cast<std::size_t>(i)];
        pulses.push_back(i % 2 == 0 ? Pulse::red(1, p.phase, p.duration)
                                    : Pulse::blue(1, p.phase, p.duration));
    }
    PulseSchedule schedule{params, std::move(pulses), "alternating"};
    JointState final = run_schedule(JointState::ground(params.fock_dim), schedule);
    auto report = make_report(std::move(schedule), final);
    report.notes.push_back("forward generator: target is the generated state");
    return report;
}

namespace {

struct Dispatch {
    const PhysicalParams& params;

    SynthesisReport operator()(const FockTarget& t) const { return compile_fock(t.n, params, t.strategy); }
    SynthesisReport operator()(const SuperpositionTarget& t) const {
        return compile_superposition(t.amplitudes, params, t.sideband, t.restore_ground);
    }
    SynthesisReport operator()(const PhaseStateTarget& t) const {
        return compile_phase_state(t.N, t.theta, params);
    }
    SynthesisReport operator()(const CoherentTarget& t) const { return compile_coherent(t.alpha, t.N, params); }
    SynthesisReport operator()(const ParityCoherentTarget& t) const {
        return compile_even_odd_coherent(t.alpha, t.N, t.parity, params);
    }
    SynthesisReport operator()(const BellTarget&) const { return compile_bell(params); }
    SynthesisReport operator()(const EntangledCarrierTarget& t) const {
        return compile_entangled_carrier(t.amplitudes, t.carrier_duration, t.carrier_phase, params);
    }
    SynthesisReport operator()(const AlternatingTarget& t) const {
        return generate_alternating(t.carrier, t.sideband_pulses, params);
    }
};

int highest_nonzero(const std::vector<complex>& c) {
    int n = 0;
    for (int j = 0; j < static_cast<int>(c.size()); ++j) {
        if (std::abs(c[j]) > kTrimTolerance) n = j;
    }
    return n;
}

}  // namespace

SynthesisReport compile(const TargetState& target, const PhysicalParams& params) {
    return std::visit(Dispatch{params}, target);
}

int default_fock_dim(const TargetState& target) {
    struct {
        int operator()(const FockTarget& t) const { return 3 * t.n + 2; }
        int operator()(const SuperpositionTarget& t) const { return 3 * highest_nonzero(t.amplitudes) + 2; }
        int operator()(const PhaseStateTarget& t) const { return 3 * t.N + 2; }
        int operator()(const CoherentTarget& t) const { return 3 * t.N + 2; }
        int operator()(const ParityCoherentTarget& t) const { return 3 * t.N + 2; }
        int operator()(const BellTarget&) const { return 1 + 2 + 2; }
        int operator()(const EntangledCarrierTarget& t) const {
            return 3 * highest_nonzero(t.amplitudes) + 2;
        }
        int operator()(const AlternatingTarget& t) const {
            return static_cast<int>(t.sideband_pulses.size()) + 4;
        }
    } visitor;
    return std::max(3, std::visit(visitor, target));
}

}  // namespace ionsynth
