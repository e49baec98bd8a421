#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "ionsynth/errors.hpp"
#include "ionsynth/state.hpp"
#include "test_support.hpp"

using namespace ionsynth;
using namespace ionsynth::testing;
using Catch::Matchers::WithinAbs;

namespace {

void require_close(complex got, complex expected, double tol = 1e-12) {
    INFO("got " << got << " expected " << expected);
    REQUIRE(std::abs(got - expected) <= tol);
}

}  // namespace

TEST_CASE("JointState construction", "[state]") {
    const auto g = JointState::ground(4);
    REQUIRE(g.dim() == 4);
    REQUIRE(g.amplitude(0, Internal::g) == complex{1.0});
    REQUIRE(g.norm_squared() == 1.0);
    REQUIRE_THROWS_AS(JointState::from_amplitudes({1.0, 1.0}), DomainError);
    REQUIRE_THROWS_AS(JointState::from_amplitudes({1.0, 0.0, 0.0}), DimensionMismatch);
    REQUIRE_THROWS_AS(JointState::normalized({0.0, 0.0}), DomainError);
    REQUIRE_THROWS_AS(JointState::basis(4, 4, Internal::e), DomainError);
    REQUIRE(joint_index(3, Internal::e) == 7);
}

TEST_CASE("zero-duration pulses are the identity", "[state]") {
    const auto p = reference_params(10);
    std::mt19937_64 rng(1);
    const auto psi = random_state(10, 10, 10, rng);
    for (const auto& pulse : {Pulse::carrier(0.3, 0.0), Pulse::red(2, 1.0, 0.0), Pulse::blue(3, 2.0, 0.0)}) {
        REQUIRE(state_distance(apply_pulse(psi, p, pulse), psi) == 0.0);
    }
}

TEST_CASE("apply_carrier", "[state]") {
    const auto p = reference_params(8);
    const double rabi00 = rabi_frequency(p, 0, 0).value;

    SECTION("quarter period at phase pi/2 sends |0>|g> to -|0>|e>") {
        const auto out = apply_carrier(JointState::ground(8), p, kPi / 2, kPi / 2 / rabi00);
        require_close(out.amplitude(0, Internal::e), -1.0);
        REQUIRE(out.population(0, Internal::g) < 1e-30);
    }
    SECTION("rotation angle depends on the Fock level") {
        std::vector<complex> amps(16);
        amps[joint_index(0, Internal::g)] = 1.0;
        amps[joint_index(5, Internal::g)] = 1.0;
        const auto psi = JointState::normalized(amps);
        const double t = 0.7 / rabi00;
        const auto out = apply_carrier(psi, p, 0.4, t);
        const double s0 = std::sin(rabi_frequency(p, 0, 0).value * t);
        const double s5 = std::sin(rabi_frequency(p, 5, 0).value * t);
        REQUIRE_THAT(out.population(0, Internal::e), WithinAbs(0.5 * s0 * s0, 1e-14));
        REQUIRE_THAT(out.population(5, Internal::e), WithinAbs(0.5 * s5 * s5, 1e-14));
        REQUIRE(std::abs(out.population(0, Internal::e) - out.population(5, Internal::e)) > 1e-3);
    }
}

TEST_CASE("apply_red", "[state]") {
    const auto p = reference_params(12);

    SECTION("|m>|g> with m < k is invariant") {
        for (int m = 0; m < 3; ++m) {
            const auto psi = JointState::basis(12, m, Internal::g);
            REQUIRE(state_distance(apply_red(psi, p, 3, 0.9, 1e-3), psi) == 0.0);
        }
    }
    SECTION("carrier then red reproduces -(-i)^n e^{i(phi_r - phi_c)} |n>|g>") {
        const int n = 3;
        const double phi_c = 0.4;
        const double phi_r = 1.1;
        const double tc = kPi / 2 / rabi_frequency(p, 0, 0).value;
        const double tr = kPi / 2 / rabi_frequency(p, 0, n).value;
        const auto mid = apply_carrier(JointState::ground(12), p, phi_c, tc);
        require_close(mid.amplitude(0, Internal::e), complex{0.0, -1.0} * std::polar(1.0, -phi_c));
        const auto out = apply_red(mid, p, n, phi_r, tr);
        const complex expected = -std::pow(complex{0.0, -1.0}, n) * std::polar(1.0, phi_r - phi_c);
        require_close(out.amplitude(n, Internal::g), expected);
    }
    SECTION("truncation guard") {
        const auto psi = JointState::basis(12, 10, Internal::e);
        REQUIRE_THROWS_AS(apply_red(psi, p, 2, 0.0, 1.0), TruncationError);
        REQUIRE_NOTHROW(apply_red(psi, p, 1, 0.0, 1.0));
    }
}

TEST_CASE("apply_blue", "[state]") {
    const auto p = reference_params(12);

    SECTION("|m>|e> with m < k is invariant") {
        for (int m = 0; m < 2; ++m) {
            const auto psi = JointState::basis(12, m, Internal::e);
            REQUIRE(state_distance(apply_blue(psi, p, 2, 0.2, 5e-3), psi) == 0.0);
        }
    }
    SECTION("blue then carrier reproduces i^{n-1} e^{-i phi_b} and -i^n e^{i(phi_c - phi_b)}") {
        const int n = 3;
        const double phi_b = 0.8;
        const double phi_c = 2.1;
        const double tb = kPi / 2 / rabi_frequency(p, 0, n).value;
        const double tc = kPi / 2 / rabi_frequency(p, n, 0).value;
        REQUIRE(rabi_frequency(p, n, 0).value > 0.0);
        const auto mid = apply_blue(JointState::ground(12), p, n, phi_b, tb);
        require_close(mid.amplitude(n, Internal::e), i_pow(n - 1) * std::polar(1.0, -phi_b));
        const auto out = apply_carrier(mid, p, phi_c, tc);
        require_close(out.amplitude(n, Internal::g), -i_pow(n) * std::polar(1.0, phi_c - phi_b));
    }
    SECTION("truncation guard") {
        const auto psi = JointState::basis(12, 11, Internal::g);
        REQUIRE_THROWS_AS(apply_blue(psi, p, 1, 0.0, 1.0), TruncationError);
    }
}

TEST_CASE("run_schedule", "[state]") {
    const auto p = reference_params(10);
    std::mt19937_64 rng(3);
    const auto psi = random_state(10, 5, 5, rng);

    SECTION("all-zero durations") {
        PulseSchedule s{p, {Pulse::carrier(1.0, 0.0), Pulse::red(2, 0.1, 0.0), Pulse::blue(1, 0.0, 0.0)}, "zero"};
        REQUIRE(state_distance(run_schedule(psi, s), psi) == 0.0);
    }
    SECTION("blue-n then carrier ends on |n>|g>") {
        const int n = 4;
        PulseSchedule s{p,
                        {Pulse::blue(n, 0.0, kPi / 2 / rabi_frequency(p, 0, n).value),
                         Pulse::carrier(0.0, kPi / 2 / std::abs(rabi_frequency(p, n, 0).value))},
                        "fock"};
        std::vector<JointState> trace;
        const auto out = run_schedule(JointState::ground(10), s, &trace);
        REQUIRE(trace.size() == 2);
        REQUIRE_THAT(trace[0].population(n, Internal::e), WithinAbs(1.0, 1e-14));
        REQUIRE_THAT(out.population(n, Internal::g), WithinAbs(1.0, 1e-14));
    }
    SECTION("truncation errors carry the pulse index") {
        PulseSchedule s{p, {Pulse::carrier(0.0, 1e-5), Pulse::blue(9, 0.0, 1.0)}, "overflow"};
        try {
            run_schedule(JointState::basis(10, 1, Internal::g), s);
            FAIL("expected truncation error");
        } catch (const TruncationError& e) {
            REQUIRE(e.pulse_index() == 1u);
        }
    }
    SECTION("dimension mismatch") {
        PulseSchedule s{reference_params(6), {Pulse::carrier(0.0, 1e-5)}, "dim"};
        REQUIRE_THROWS_AS(run_schedule(psi, s), DimensionMismatch);
    }
}

TEST_CASE("fidelity", "[state]") {
    std::mt19937_64 rng(5);
    const auto psi = random_state(6, 6, 6, rng);
    REQUIRE_THAT(fidelity(psi, psi), WithinAbs(1.0, 1e-15));
    REQUIRE(fidelity(JointState::basis(6, 0, Internal::g), JointState::basis(6, 0, Internal::e)) == 0.0);
    for (const double gamma : {0.3, 1.7, 3.1, -2.4}) {
        REQUIRE_THAT(fidelity(psi, psi.with_global_phase(gamma)), WithinAbs(1.0, 1e-15));
        const double c = std::max(0.0, std::cos(gamma));
        REQUIRE_THAT(fidelity(psi, psi.with_global_phase(gamma), FidelityMode::exact_phase),
                     WithinAbs(c * c, 1e-14));
    }
    REQUIRE_THROWS_AS(fidelity(psi, JointState::ground(5)), DimensionMismatch);
}

TEST_CASE("pulse operators preserve the norm on guarded states", "[state][property]") {
    const int dim = 20;
    const auto p = reference_params(dim);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const auto pulse = random_pulse(p, 6, 6.0, rng);
        const auto psi = random_guarded_state(dim, pulse, rng);
        std::vector<complex> amps(psi.amplitudes().begin(), psi.amplitudes().end());
        apply_pulse_in_place(amps, p, pulse);
        double norm2 = 0.0;
        for (const auto& a : amps) norm2 += std::norm(a);
        REQUIRE_THAT(norm2, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("shifting the phase by pi inverts a pulse", "[state][property]") {
    // Each 2x2 block [[cos, -conj(C)], [C, cos]] has inverse [[cos, conj(C)], [-C, cos]].
    const int dim = 20;
    const auto p = reference_params(dim);
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        const auto pulse = random_pulse(p, 5, 4.0, rng);
        const auto psi = random_guarded_state(dim, pulse, rng);
        auto inverse = pulse;
        inverse.phase = wrap_phase(pulse.phase + kPi);
        const auto back = apply_pulse(apply_pulse(psi, p, pulse), p, inverse);
        REQUIRE(state_distance(back, psi) <= 1e-10);
    }
}

TEST_CASE("pulse operators are linear", "[state][property]") {
    const int dim = 15;
    const auto p = reference_params(dim);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pulse = random_pulse(p, 4, 4.0, rng);
        const auto psi = random_guarded_state(dim, pulse, rng);
        const auto chi = random_guarded_state(dim, pulse, rng);
        const complex alpha = random_complex(rng);
        const complex beta = random_complex(rng);

        std::vector<complex> combo(psi.amplitudes().size());
        for (std::size_t i = 0; i < combo.size(); ++i) {
            combo[i] = alpha * psi.amplitudes()[i] + beta * chi.amplitudes()[i];
        }
        apply_pulse_in_place(combo, p, pulse);
        const auto a = apply_pulse(psi, p, pulse);
        const auto b = apply_pulse(chi, p, pulse);
        for (std::size_t i = 0; i < combo.size(); ++i) {
            REQUIRE(std::abs(combo[i] - (alpha * a.amplitudes()[i] + beta * b.amplitudes()[i])) <= 1e-12);
        }
    }
}

TEST_CASE("sidebands of order k only couple levels k apart", "[state][property]") {
    const int dim = 14;
    const auto p = reference_params(dim);
    for (const auto kind : {SidebandKind::red, SidebandKind::blue}) {
        for (int k = 1; k <= 4; ++k) {
            const Pulse pulse{kind, k, 0.7, 0.6 / rabi_frequency(p, 0, k).value};
            for (int m = 0; m < dim; ++m) {
                for (const auto s : {Internal::g, Internal::e}) {
                    const bool raises = (kind == SidebandKind::red) == (s == Internal::e);
                    if (raises && m + k >= dim) continue;
                    const auto out = apply_pulse(JointState::basis(dim, m, s), p, pulse);
                    for (int n = 0; n < dim; ++n) {
                        for (const auto t : {Internal::g, Internal::e}) {
                            if (out.population(n, t) == 0.0) continue;
                            const bool same = n == m && t == s;
                            const bool partner = t != s && std::abs(n - m) == k;
                            REQUIRE((same || partner));
                        }
                    }
                }
            }
        }
    }
}
