#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "ionsynth/errors.hpp"
#include "ionsynth/oracle.hpp"
#include "ionsynth/synthesis.hpp"
#include "test_support.hpp"

using namespace ionsynth;
using namespace ionsynth::testing;
using Catch::Matchers::WithinAbs;

TEST_CASE("carrier Hamiltonian in the Lamb-Dicke limit", "[oracle]") {
    auto p = reference_params(6);
    p.eta = 1e-8;
    const auto h = build_hamiltonian(p, SidebandKind::carrier, 0, 0.6);
    const complex expected = std::polar(p.omega_carrier / 2, -0.6);
    for (int m = 0; m < 6; ++m) {
        const auto e = h.entries(joint_index(m, Internal::e), joint_index(m, Internal::g));
        REQUIRE(std::abs(e - expected) <= 1e-10 * p.omega_carrier);
    }
}

TEST_CASE("Hamiltonian coupling elements equal the closed-form Rabi frequencies", "[oracle]") {
    const int dim = 24;
    const auto p = reference_params(dim);
    const double phase = 1.3;
    for (const auto kind : {SidebandKind::carrier, SidebandKind::red, SidebandKind::blue}) {
        for (int k = (kind == SidebandKind::carrier ? 0 : 1); k <= (kind == SidebandKind::carrier ? 0 : 5); ++k) {
            const auto h = build_hamiltonian(p, kind, k, phase);
            REQUIRE(hermiticity_residual(h.entries) <= 1e-13 * p.omega_carrier);
            for (int m = 0; m + k < dim; ++m) {
                const double rabi = rabi_frequency(p, m, k).value;
                const complex expected = i_pow(k) * std::polar(1.0, -phase) * rabi;
                const int lower = m;
                const int upper = m + k;
                complex got;
                if (kind == SidebandKind::red) {
                    got = h.entries(joint_index(lower, Internal::e), joint_index(upper, Internal::g));
                } else {
                    got = h.entries(joint_index(upper, Internal::e), joint_index(lower, Internal::g));
                }
                INFO("kind " << to_string(kind) << " m " << m << " k " << k);
                REQUIRE(std::abs(got - expected) <= 1e-10 * std::max(std::abs(rabi), 1e-6 * p.omega_carrier));
            }
        }
    }
}

TEST_CASE("Hamiltonian has no g-g or e-e blocks", "[oracle]") {
    const auto p = reference_params(12);
    const auto h = build_hamiltonian(p, SidebandKind::red, 2, 0.1);
    for (int m = 0; m < 12; ++m) {
        for (int n = 0; n < 12; ++n) {
            REQUIRE(h.entries(joint_index(m, Internal::g), joint_index(n, Internal::g)) == complex{});
            REQUIRE(h.entries(joint_index(m, Internal::e), joint_index(n, Internal::e)) == complex{});
        }
    }
}

TEST_CASE("extra series terms do not change the Hamiltonian", "[oracle]") {
    const auto p = reference_params(30);
    for (int k : {0, 1, 4}) {
        const auto kind = k == 0 ? SidebandKind::carrier : SidebandKind::red;
        const auto base = build_hamiltonian(p, kind, k, 0.2);
        const auto more = build_hamiltonian(p, kind, k, 0.2, {.extra_terms = 5});
        REQUIRE(more.series_terms >= base.series_terms);
        REQUIRE((more.entries - base.entries).cwiseAbs().maxCoeff() <= 1e-12 * p.omega_carrier / 2);
    }
}

TEST_CASE("order beyond the truncation is rejected", "[oracle]") {
    REQUIRE_THROWS_AS(build_hamiltonian(reference_params(4), SidebandKind::blue, 4, 0.0), TruncationError);
}

TEST_CASE("propagate", "[oracle]") {
    const auto p = reference_params(10);
    std::mt19937_64 rng(7);
    const auto psi = random_state(10, 10, 10, rng);
    const auto h = build_hamiltonian(p, SidebandKind::carrier, 0, 0.9);

    SECTION("zero duration") { REQUIRE(state_distance(propagate(h, psi, 0.0), psi) == 0.0); }
    SECTION("full carrier cycle returns to |0>|g>") {
        const double t = 2 * kPi / rabi_frequency(p, 0, 0).value;
        const auto out = propagate(h, JointState::ground(10), t);
        REQUIRE(std::abs(out.amplitude(0, Internal::g) - 1.0) <= 1e-10);
    }
    SECTION("non-Hermitian input is rejected") {
        auto bad = h;
        bad.entries(0, 1) += complex{0.0, 1.0};
        REQUIRE_THROWS_AS(propagate(bad, psi, 1e-5), DomainError);
    }
    SECTION("energy is conserved") {
        const auto hb = build_hamiltonian(p, SidebandKind::blue, 2, 0.4);
        const double before = expectation(hb, psi);
        for (const double t : {1e-5, 3e-4, 2e-3}) {
            REQUIRE(std::abs(expectation(hb, propagate(hb, psi, t)) - before) <= 1e-9 * p.omega_carrier);
        }
    }
}

TEST_CASE("first red sideband agrees with the closed form at large truncation", "[oracle]") {
    const int dim = 40;
    const auto p = reference_params(dim);
    const auto pulse = Pulse::red(1, 0.77, 2.3 / rabi_frequency(p, 0, 1).value);
    std::mt19937_64 rng(11);
    const auto psi = random_guarded_state(dim, pulse, rng);
    const auto closed = apply_pulse(psi, p, pulse);
    const auto oracle = propagate(build_hamiltonian(p, pulse.kind, pulse.order, pulse.phase), psi, pulse.duration);
    REQUIRE(state_distance(closed, oracle) <= 1e-8);
}

TEST_CASE("verify_schedule", "[oracle]") {
    SECTION("empty schedule") {
        PulseSchedule s{reference_params(6), {}, "empty"};
        const auto v = verify_schedule(JointState::ground(6), s);
        REQUIRE(v.fidelity == 1.0);
        REQUIRE(v.hermiticity_residuals.empty());
    }
    SECTION("compiled Fock state") {
        auto report = compile_fock(5, reference_params(default_fock_dim(FockTarget{5})));
        const auto v = verify_report(report);
        REQUIRE(report.oracle_fidelity.has_value());
        REQUIRE(*report.oracle_fidelity >= 1 - 1e-8);
        REQUIRE(v.exact_phase_fidelity >= 1 - 1e-8);
        REQUIRE(v.hermiticity_residuals.size() == 2);
    }
    SECTION("compiled phase state") {
        auto report = compile_phase_state(4, kPi / 3, reference_params(default_fock_dim(PhaseStateTarget{4, kPi / 3})));
        verify_report(report);
        REQUIRE(*report.oracle_fidelity >= 1 - 1e-8);
    }
}

TEST_CASE("closed form matches the oracle on random pulses", "[oracle][property]") {
    const int dim = 24;
    const auto p = reference_params(dim);
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 40; ++trial) {
        const auto pulse = random_pulse(p, 4, 5.0, rng);
        const auto psi = random_guarded_state(dim, pulse, rng);
        const auto h = build_hamiltonian(p, pulse.kind, pulse.order, pulse.phase);
        REQUIRE(state_distance(apply_pulse(psi, p, pulse), propagate(h, psi, pulse.duration)) <= 1e-8);
    }
}
