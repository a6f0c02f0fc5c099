#include "coevent/cli.hpp"

#include "coevent/errors.hpp"
#include "coevent/oracle.hpp"
#include "coevent/scheme.hpp"
#include "coevent/systems.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace coevent::cli {

namespace {

using nlohmann::json;

struct Common {
    std::string system_path;
    StageIndex stages = 2;
    std::optional<std::size_t> max_histories;
    std::optional<double> tolerance;
    std::string scheme = "basic";
    std::string mode = "all";
};

void add_common(CLI::App* cmd, Common& c, bool scheme_required) {
    cmd->add_option("--system", c.system_path, "system spec JSON file")->required();
    cmd->add_option("--stages", c.stages, "last stage T");
    cmd->add_option("--max-histories", c.max_histories, "history cap per stage");
    cmd->add_option("--tolerance", c.tolerance, "relative null tolerance");
    auto* s = cmd->add_option("--scheme", c.scheme, "classical|basic|maxaff|global");
    if (scheme_required) s->required();
    cmd->add_option("--mode", c.mode, "co-events per support: all|maxaff")->check(CLI::IsMember({"all", "maxaff"}));
}

EngineConfig make_config(const Common& c, const SystemSpec& spec) {
    EngineConfig config;
    if (spec.max_histories) config.max_histories = *spec.max_histories;
    if (const char* env = std::getenv("COEVENT_MAX_HISTORIES")) {
        try {
            config.max_histories = std::stoul(env);
        } catch (const std::exception&) {
            throw ValidationError(std::string("COEVENT_MAX_HISTORIES is not a number: ") + env);
        }
    }
    if (c.max_histories) config.max_histories = *c.max_histories;
    if (c.tolerance) config.null_tolerance = *c.tolerance;
    return config;
}

SynthesisMode make_mode(const Common& c) {
    return c.mode == "maxaff" ? SynthesisMode::max_affirmative : SynthesisMode::all;
}

json labels_of(const Event& e, const Stage& stage) {
    json out = json::array();
    e.for_each([&](HistoryIndex h) { out.push_back(stage.label(h)); });
    return out;
}

json coevent_json(const CoEvent& phi, const Stage& stage) {
    json monomials = json::array();
    for (const auto& m : phi.monomials()) monomials.push_back(labels_of(m, stage));
    return {{"monomials", monomials}, {"support", labels_of(support(phi), stage)}, {"text", render(phi, stage)}};
}

json state_json(const SchemeState& state, const Stage& stage) {
    json list = json::array();
    for (std::size_t i = 0; i < state.coevents.size(); ++i) {
        json c = coevent_json(state.coevents[i], stage);
        c["lineage"] = state.lineage[i];
        list.push_back(c);
    }
    json j = {{"t", state.t}, {"count", state.size()}, {"coevents", list}};
    if (state.scheme == Scheme::global_minimal) j["dead_ends"] = state.dead_ends;
    return j;
}

int cmd_run(const Common& c, bool skip_checks, const std::string& out_path, std::ostream& out, std::ostream& err) {
    const SystemSpec spec = load_system_spec(c.system_path);
    const EngineConfig config = make_config(c, spec);
    const System system = build_system(spec, c.stages, config);
    const Scheme scheme = parse_scheme(c.scheme);
    const auto states = run(system, scheme, c.stages, config, make_mode(c));

    std::ofstream file;
    std::ostream* sink = &out;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw ValidationError("cannot write '" + out_path + "'");
        sink = &file;
    }
    for (const auto& s : states) *sink << state_json(s, system.stages[s.t]).dump() << "\n";

    if (!skip_checks) {
        const auto report = check_theorems(system, states, config);
        if (const auto* f = report.first_failure()) {
            err << "theorem check failed: " << f->name << " at stage " << f->t << ": " << f->detail << "\n";
            return kValidationError;
        }
    }
    return kOk;
}

int cmd_verify(const Common& c, bool scheme_given, bool with_oracle, bool as_json, std::ostream& out,
               std::ostream& err) {
    const SystemSpec spec = load_system_spec(c.system_path);
    const EngineConfig config = make_config(c, spec);
    const System system = build_system(spec, c.stages, config);
    const auto diag = validate_measure(system.stages, system.matrices, config.validation_tolerance,
                                       config.null_tolerance);

    std::vector<Scheme> schemes;
    if (scheme_given) {
        schemes.push_back(parse_scheme(c.scheme));
    } else {
        schemes = {Scheme::basic, Scheme::max_affirmative, Scheme::global_minimal};
        if (diag.all_classical()) schemes.insert(schemes.begin(), Scheme::classical);
    }

    TheoremReport report;
    for (const auto& m : diag.checks) {
        char violation[32];
        std::snprintf(violation, sizeof violation, "%.3g", m.max_violation);
        TheoremCheck check{"measure_" + m.name, m.t, 1, m.passed, false, std::string("max violation ") + violation};
        report.checks.push_back(check);
    }
    for (auto scheme : schemes) {
        TheoremReport part = check_theorems(system, run(system, scheme, c.stages, config, make_mode(c)), config);
        if (with_oracle) part.append(check_oracle_equivalence(system, scheme, c.stages, config));
        for (auto& check : part.checks) check.name = scheme_name(scheme) + "." + check.name;
        report.append(part);
    }
    if (as_json) {
        out << report.to_json() << "\n";
    } else {
        out << report.to_text();
    }
    if (const auto* f = report.first_failure()) {
        err << "verification failed: " << f->name << " at stage " << f->t << ": " << f->detail << "\n";
        return kValidationError;
    }
    return kOk;
}

int cmd_walk(const Common& c, const std::string& policy_name, std::uint64_t seed, bool as_json, std::istream& in,
             std::ostream& out, std::ostream& err) {
    const SystemSpec spec = load_system_spec(c.system_path);
    const EngineConfig config = make_config(c, spec);
    const System system = build_system(spec, c.stages, config);
    const Scheme scheme = parse_scheme(c.scheme);

    WalkPolicy policy;
    if (policy_name == "random") {
        policy = WalkPolicy::seeded_random(seed);
    } else if (policy_name == "interactive") {
        policy = WalkPolicy::interactive([&](StageIndex t, const std::vector<CoEvent>& candidates) {
            const Stage& stage = system.stages[t];
            out << "stage " << t << ": " << candidates.size() << " candidates\n";
            for (std::size_t i = 0; i < candidates.size(); ++i)
                out << "  [" << i << "] " << render(candidates[i], stage) << "\n";
            err << "choose 0-" << candidates.size() - 1 << ": " << std::flush;
            std::size_t choice = 0;
            if (!(in >> choice)) throw ValidationError("no choice on standard input for stage " + std::to_string(t));
            return choice;
        });
    }
    const WalkTranscript transcript = walk(system, scheme, c.stages, policy, config, make_mode(c));

    if (as_json) {
        json steps = json::array();
        for (const auto& s : transcript.steps) {
            json cands = json::array();
            for (const auto& phi : s.candidates) cands.push_back(coevent_json(phi, system.stages[s.t]));
            steps.push_back({{"t", s.t}, {"candidates", cands}, {"chosen", s.chosen}});
        }
        json j = {{"scheme", scheme_name(scheme)}, {"policy", policy_name}, {"seed", seed},
                  {"steps", steps}, {"choices", transcript.choices()}, {"terminated", transcript.terminated}};
        if (transcript.terminated) j["terminated_at"] = transcript.terminated_at;
        out << j.dump() << "\n";
    } else {
        for (const auto& s : transcript.steps) {
            const Stage& stage = system.stages[s.t];
            if (policy.kind != WalkPolicy::Kind::interactive) {
                out << "stage " << s.t << ": " << s.candidates.size() << " candidates\n";
                for (std::size_t i = 0; i < s.candidates.size(); ++i)
                    out << "  [" << i << "] " << render(s.candidates[i], stage) << "\n";
            }
            out << "  chosen " << s.chosen << ": " << render(s.expressed(), stage) << "\n";
        }
        if (!transcript.steps.empty()) {
            const auto& last = transcript.steps.back();
            out << "final: " << render(last.expressed(), system.stages[last.t]) << "\n";
        }
    }
    if (transcript.terminated) {
        err << "dead end at stage " << transcript.terminated_at << "\n";
        return kDeadEnd;
    }
    return kOk;
}

int cmd_inspect(const Common& c, std::ostream& out) {
    const SystemSpec spec = load_system_spec(c.system_path);
    const EngineConfig config = make_config(c, spec);
    out << dump_custom_spec(build_system(spec, c.stages, config)) << "\n";
    return kOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Evolving co-event schemes over finite history spaces", "coevent"};
    app.require_subcommand(1);

    Common run_opts, verify_opts, walk_opts, inspect_opts;
    bool skip_checks = false, with_oracle = false, verify_json = false, walk_json = false;
    std::string out_path, policy_name = "first";
    std::uint64_t seed = 0;

    auto* run_cmd = app.add_subcommand("run", "enumerate the allowed co-events stage by stage");
    add_common(run_cmd, run_opts, true);
    run_cmd->add_option("--out", out_path, "write JSON lines here instead of standard output");
    run_cmd->add_flag("--no-check", skip_checks, "skip the theorem checks");

    auto* verify_cmd = app.add_subcommand("verify", "validate the measure and check the theorems");
    add_common(verify_cmd, verify_opts, false);
    verify_cmd->add_flag("--oracle", with_oracle, "compare with brute force on small stages");
    verify_cmd->add_flag("--json", verify_json, "JSON report");

    auto* walk_cmd = app.add_subcommand("walk", "choose one co-event per stage");
    add_common(walk_cmd, walk_opts, true);
    walk_cmd->add_option("--policy", policy_name, "first|random|interactive")
        ->check(CLI::IsMember({"first", "random", "interactive"}));
    walk_cmd->add_option("--seed", seed, "seed for the random policy");
    walk_cmd->add_flag("--json", walk_json, "JSON transcript");

    auto* inspect_cmd = app.add_subcommand("inspect", "dump the built system with explicit matrices");
    add_common(inspect_cmd, inspect_opts, false);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidationError;
    }

    try {
        if (*run_cmd) return cmd_run(run_opts, skip_checks, out_path, out, err);
        if (*verify_cmd) return cmd_verify(verify_opts, verify_cmd->count("--scheme") > 0, with_oracle, verify_json, out, err);
        if (*walk_cmd) return cmd_walk(walk_opts, policy_name, seed, walk_json, in, out, err);
        if (*inspect_cmd) return cmd_inspect(inspect_opts, out);
    } catch (const BudgetError& e) {
        err << "budget exceeded: " << e.what() << "\n";
        return kBudgetError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    }
    return kValidationError;
}

} // namespace coevent::cli
