#include "ionsynth/physics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ionsynth/errors.hpp"

namespace ionsynth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// i^n for integer n (any sign).
complex i_power(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// Unit-modulus factor multiplying e^{-i phase} sin(.) in the coefficient c.
complex coefficient_prefactor(SidebandKind kind, int order) {
    if (kind == SidebandKind::carrier) return {0.0, -1.0};
    return i_power(order - 1);
}

}  // namespace

void PhysicalParams::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw DomainError("eta must be positive and finite");
    }
    if (!(omega_carrier > 0.0) || !std::isfinite(omega_carrier)) {
        throw DomainError("omega_carrier must be positive and finite");
    }
    if (fock_dim < 2) throw DomainError("fock_dim must be at least 2");
}

double lamb_dicke_parameter(double ion_mass_kg, double trap_freq, double atomic_freq, int order,
                            int sign) {
    constexpr double hbar = 1.054571817e-34;
    constexpr double c = 299792458.0;
    if (!(ion_mass_kg > 0.0) || !(trap_freq > 0.0) || !(atomic_freq > 0.0) || order < 0) {
        throw DomainError("lamb_dicke_parameter: mass, frequencies must be positive");
    }
    const double laser = atomic_freq + (sign < 0 ? -1.0 : 1.0) * order * trap_freq;
    return laser / c * std::sqrt(hbar / (2.0 * ion_mass_kg * trap_freq));
}

const char* to_string(SidebandKind kind) noexcept {
    switch (kind) {
        case SidebandKind::carrier: return "carrier";
        case SidebandKind::red: return "red";
        case SidebandKind::blue: return "blue";
    }
    return "?";
}

RabiValue rabi_frequency(const PhysicalParams& params, int m, int k) {
    if (m < 0 || k < 0) throw DomainError("rabi_frequency: negative Fock index or order");
    const double eta = params.eta;
    const double x = eta * eta;

    // Normalised series sum_j u_j with u_0 = 1 and
    // u_{j+1}/u_j = -x (m-j) / ((j+1)(j+k+1)), evaluated in Horner form.
    double series = 1.0;
    for (int j = m - 1; j >= 0; --j) {
        const double ratio = -x * (m - j) / ((j + 1.0) * (j + k + 1.0));
        series = 1.0 + ratio * series;
    }

    // log of (Omega/2) eta^k e^{-x/2} sqrt((m+k)!/m!) / k!, accumulated term by term.
    double log_prefactor = std::log(0.5 * params.omega_carrier) - 0.5 * x;
    for (int i = 1; i <= k; ++i) {
        log_prefactor += std::log(eta) + 0.5 * std::log(double(m + i)) - std::log(double(i));
    }

    if (series == 0.0) return {m, k, 0.0};
    const double log_magnitude = log_prefactor + std::log(std::abs(series));
    if (log_magnitude < std::log(std::numeric_limits<double>::min())) {
        std::ostringstream msg;
        msg << "rabi_frequency underflow at m=" << m << ", k=" << k
            << " (log magnitude " << log_magnitude << ")";
        throw UnderflowError(msg.str(), log_magnitude);
    }
    return {m, k, std::copysign(std::exp(log_magnitude), series)};
}

PulseCoefficient pulse_coefficient(SidebandKind kind, int order, double rabi, double phase,
                                   double duration) {
    const double angle = rabi * duration;
    const double s = std::sin(angle);
    const complex c = coefficient_prefactor(kind, order) * std::polar(1.0, -phase) * s;
    return {c, -std::conj(c), std::cos(angle)};
}

PulseCoefficient pulse_coefficient(const PhysicalParams& params, SidebandKind kind, int order,
                                   int m, double phase, double duration) {
    if (duration < 0.0) throw DomainError("pulse duration must be nonnegative");
    if (m < 0 || m >= params.fock_dim) throw DomainError("Fock index outside truncation");
    const int k = kind == SidebandKind::carrier ? 0 : order;
    return pulse_coefficient(kind, order, rabi_frequency(params, m, k).value, phase, duration);
}

double phase_for_coefficient(SidebandKind kind, int order, complex desired_c) {
    if (desired_c == complex{}) return 0.0;
    // c = prefactor e^{-i phase} |s|  =>  phase = arg(prefactor) - arg(c)
    return wrap_phase(std::arg(coefficient_prefactor(kind, order)) - std::arg(desired_c));
}

double shortest_duration_for(const PhysicalParams& params, SidebandKind kind, int order, int m,
                             double target, DurationBranch branch) {
    if (!(target >= 0.0 && target <= 1.0)) {
        throw DomainError("shortest_duration_for: target must lie in [0, 1]");
    }
    const double angle = branch == DurationBranch::sin_branch ? std::asin(target)
                                                              : std::acos(target);
    if (angle == 0.0) return 0.0;
    const int k = kind == SidebandKind::carrier ? 0 : order;
    const double rabi = std::abs(rabi_frequency(params, m, k).value);
    if (rabi == 0.0) {
        throw DomainError("shortest_duration_for: Rabi frequency vanishes at this level");
    }
    return angle / rabi;
}

double wrap_phase(double phase) noexcept {
    double wrapped = std::fmod(phase, kTwoPi);
    if (wrapped < 0.0) wrapped += kTwoPi;
    if (wrapped >= kTwoPi) wrapped = 0.0;
    return wrapped;
}

}  // namespace ionsynth
