#include "ionsynth/cli.hpp"

#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "ionsynth/errors.hpp"
#include "ionsynth/io.hpp"

namespace ionsynth::cli {

namespace {

const std::vector<double> kFigureEtas{0.202, 0.25, 0.35, 0.5, 0.9};

struct Options {
    std::optional<double> eta;
    std::optional<double> omega;
    std::optional<int> fock_dim;
    std::string format = "json";
    std::string out_path;
    std::optional<double> tolerance;
    std::uint64_t seed = 20240601;

    // rabi
    int m_max = 0;
    int k_max = 20;
    // synthesize / verify
    std::string target_path;
    std::string report_path;
    // simulate / verify
    std::string schedule_path;
    std::string initial = "ground";
    bool trace = false;
    int samples = 0;
};

PhysicalParams params_from(const Options& o, int fallback_dim) {
    PhysicalParams p;
    if (o.eta) p.eta = *o.eta;
    if (o.omega) p.omega_carrier = *o.omega;
    p.fock_dim = o.fock_dim.value_or(fallback_dim);
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw InputError(e.what());
    }
    return p;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
    } else {
        write_text_file_atomic(path, text);
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_rabi(const Options& o, std::ostream& out) {
    const std::vector<double> etas = o.eta ? std::vector<double>{*o.eta} : kFigureEtas;
    const auto rows = rabi_table(etas, o.omega.value_or(PhysicalParams{}.omega_carrier), o.m_max, o.k_max);
    if (o.format == "csv") {
        std::ostringstream csv;
        write_rabi_csv(csv, rows);
        emit(o.out_path, csv.str(), out);
    } else {
        emit(o.out_path, dump(to_json(rows)), out);
    }
    return kSuccess;
}

std::string pulse_table_csv(const PulseSchedule& s) {
    std::ostringstream csv;
    csv << "index,kind,k,phase_rad,duration_s\n";
    for (std::size_t i = 0; i < s.pulses.size(); ++i) {
        const auto& p = s.pulses[i];
        csv << i << ',' << to_string(p.kind) << ',' << p.order << ',' << format_double(p.phase)
            << ',' << format_double(p.duration) << '\n';
    }
    return csv.str();
}

int cmd_synthesize(const Options& o, std::ostream& out) {
    const TargetState target = target_from_json(parse_json(read_text_file(o.target_path)));
    const PhysicalParams params = params_from(o, default_fock_dim(target));
    SynthesisReport report = compile(target, params);
    verify_report(report);

    const double threshold = 1.0 - o.tolerance.value_or(1e-9);
    if (!o.out_path.empty()) write_text_file_atomic(o.out_path, dump(to_json(report.schedule)));

    json doc = to_json(report);
    doc["schedule"] = to_json(report.schedule);
    doc["fidelity_threshold"] = threshold;
    doc["pass"] = report.fidelity_vs_target >= threshold;
    emit(o.report_path, o.format == "csv" ? pulse_table_csv(report.schedule) : dump(doc), out);
    return report.fidelity_vs_target >= threshold ? kSuccess : kVerificationFailure;
}

PulseSchedule load_schedule(const Options& o) {
    auto schedule = schedule_from_json(parse_json(read_text_file(o.schedule_path)));
    if (o.fock_dim) schedule.params.fock_dim = *o.fock_dim;
    return schedule;
}

std::string state_csv(const JointState& s) {
    std::ostringstream csv;
    csv << "m,internal,re,im,population\n";
    for (int m = 0; m < s.dim(); ++m) {
        for (const auto internal : {Internal::g, Internal::e}) {
            const complex a = s.amplitude(m, internal);
            csv << m << ',' << (internal == Internal::g ? 'g' : 'e') << ','
                << format_double(a.real()) << ',' << format_double(a.imag()) << ','
                << format_double(std::norm(a)) << '\n';
        }
    }
    return csv.str();
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const auto schedule = load_schedule(o);
    const JointState initial = o.initial == "ground"
                                   ? JointState::ground(schedule.params.fock_dim)
                                   : state_from_json(parse_json(read_text_file(o.initial)));
    std::vector<JointState> trace;
    const JointState final = run_schedule(initial, schedule, o.trace ? &trace : nullptr);

    if (o.format == "csv") {
        emit(o.out_path, state_csv(final), out);
        return kSuccess;
    }
    json doc = {{"final", to_json(final)}, {"total_duration_s", schedule.total_duration()}};
    if (o.trace) {
        json steps = json::array();
        for (const auto& s : trace) steps.push_back(to_json(s));
        doc["trace"] = steps;
    }
    emit(o.out_path, dump(doc), out);
    return kSuccess;
}

// Random initial state on the low Fock levels that no pulse of the schedule
// can push past the truncation.
std::optional<JointState> random_guarded_state(const PulseSchedule& s, std::mt19937_64& rng) {
    int headroom = s.params.fock_dim - 1;
    for (const auto& p : s.pulses) headroom -= p.order;
    if (headroom < 0) return std::nullopt;
    std::normal_distribution<double> normal;
    std::vector<complex> amps(2 * static_cast<std::size_t>(s.params.fock_dim));
    for (int m = 0; m <= headroom; ++m) {
        amps[joint_index(m, Internal::g)] = {normal(rng), normal(rng)};
        amps[joint_index(m, Internal::e)] = {normal(rng), normal(rng)};
    }
    return JointState::normalized(std::move(amps));
}

int cmd_verify(const Options& o, std::ostream& out) {
    const auto schedule = load_schedule(o);
    const double tolerance = o.tolerance.value_or(1e-8);
    const auto result = verify_schedule(JointState::ground(schedule.params.fock_dim), schedule);
    bool pass = result.fidelity >= 1.0 - tolerance;

    json doc = to_json(result);
    doc["tolerance"] = tolerance;
    if (!o.target_path.empty()) {
        const TargetState target = target_from_json(parse_json(read_text_file(o.target_path)));
        const auto expected = compile(target, schedule.params).target;
        const double f = fidelity(expected, result.closed_form_final);
        doc["target_fidelity"] = f;
        pass = pass && f >= 1.0 - tolerance;
    }
    if (o.samples > 0) {
        std::mt19937_64 rng(o.seed);
        json fids = json::array();
        for (int i = 0; i < o.samples; ++i) {
            const auto initial = random_guarded_state(schedule, rng);
            if (!initial) break;
            const double f = verify_schedule(*initial, schedule).fidelity;
            fids.push_back(f);
            pass = pass && f >= 1.0 - tolerance;
        }
        doc["seed"] = o.seed;
        doc["random_state_fidelities"] = fids;
    }
    doc["pass"] = pass;
    emit(o.out_path, dump(doc), out);
    return pass ? kSuccess : kVerificationFailure;
}

void write_error(std::ostream& err, const char* kind, const std::string& message,
                 json extra = json::object()) {
    extra["error"] = kind;
    extra["message"] = message;
    err << extra.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pulse-schedule compiler for a single trapped ion beyond the Lamb-Dicke limit",
                 "ionsynth"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--eta", o.eta, "Lamb-Dicke parameter (default 0.25)");
        sub->add_option("--omega-rad-s", o.omega, "carrier Rabi frequency in rad/s (default 5e4)");
        sub->add_option("--fock-dim", o.fock_dim, "Fock truncation dimension");
        sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", o.out_path, "output file (default stdout)");
        sub->add_option("--tolerance", o.tolerance, "allowed infidelity")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "seed for randomized checks");
    };

    auto* rabi = app.add_subcommand("rabi", "table of Rabi frequencies Omega_{m,k}");
    add_common(rabi);
    rabi->add_option("--m-max", o.m_max, "largest Fock index");
    rabi->add_option("--k-max", o.k_max, "largest sideband order");

    auto* synth = app.add_subcommand("synthesize", "compile a target state into a pulse schedule");
    add_common(synth);
    synth->add_option("--target", o.target_path, "target state JSON")->required();
    synth->add_option("--report", o.report_path, "report file (default stdout)");

    auto* sim = app.add_subcommand("simulate", "run a schedule with the closed-form operators");
    add_common(sim);
    sim->add_option("--schedule", o.schedule_path, "schedule JSON")->required();
    sim->add_option("--initial", o.initial, "\"ground\" or a state JSON file");
    sim->add_flag("--trace", o.trace, "emit the state after every pulse");

    auto* verify = app.add_subcommand("verify", "check a schedule against matrix-exponential propagation");
    add_common(verify);
    verify->add_option("--schedule", o.schedule_path, "schedule JSON")->required();
    verify->add_option("--target", o.target_path, "optional target state JSON");
    verify->add_option("--samples", o.samples, "extra random guarded initial states");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        write_error(err, "usage_error", e.what());
        return kInputError;
    }

    try {
        if (rabi->parsed()) return cmd_rabi(o, out);
        if (synth->parsed()) return cmd_synthesize(o, out);
        if (sim->parsed()) return cmd_simulate(o, out);
        return cmd_verify(o, out);
    } catch (const TruncationError& e) {
        json extra = json::object();
        if (e.pulse_index()) extra["pulse_index"] = *e.pulse_index();
        write_error(err, e.kind(), e.what(), extra);
        return kInputError;
    } catch (const UnderflowError& e) {
        write_error(err, e.kind(), e.what(), {{"log_magnitude", e.log_magnitude()}});
        return kInputError;
    } catch (const NumericalError& e) {
        write_error(err, e.kind(), e.what());
        return kVerificationFailure;
    } catch (const Error& e) {
        write_error(err, e.kind(), e.what());
        return kInputError;
    }
}

}  // namespace ionsynth::cli
