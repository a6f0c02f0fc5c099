#include "coevent/scheme.hpp"

#include "coevent/errors.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <set>

namespace coevent {

std::string scheme_name(Scheme scheme) {
    switch (scheme) {
    case Scheme::classical: return "classical";
    case Scheme::basic: return "basic";
    case Scheme::max_affirmative: return "maxaff";
    case Scheme::global_minimal: return "global";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "classical") return Scheme::classical;
    if (name == "basic") return Scheme::basic;
    if (name == "maxaff" || name == "max_affirmative") return Scheme::max_affirmative;
    if (name == "global" || name == "global_minimal") return Scheme::global_minimal;
    throw SchemeMisuseError("unknown scheme '" + name + "'");
}

std::vector<std::size_t> SchemeState::successors_of(std::size_t p) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < lineage.size(); ++i)
        if (std::find(lineage[i].begin(), lineage[i].end(), p) != lineage[i].end()) out.push_back(i);
    return out;
}

namespace {

SynthesisMode effective_mode(Scheme scheme, SynthesisMode mode) {
    return scheme == Scheme::max_affirmative ? SynthesisMode::max_affirmative : mode;
}

// Sorted, duplicate-free state from (co-event, predecessor) pairs.
SchemeState assemble(StageIndex t, Scheme scheme, std::vector<std::pair<CoEvent, std::size_t>> items,
                     std::size_t previous_count, bool has_previous) {
    std::map<CoEvent, std::set<std::size_t>> merged;
    for (auto& [phi, p] : items) {
        auto& preds = merged[std::move(phi)];
        if (has_previous) preds.insert(p);
    }
    SchemeState state;
    state.t = t;
    state.scheme = scheme;
    std::vector<bool> used(previous_count, false);
    for (auto& [phi, preds] : merged) {
        state.coevents.push_back(phi);
        state.lineage.emplace_back(preds.begin(), preds.end());
        for (auto p : preds) used[p] = true;
    }
    for (std::size_t p = 0; p < previous_count; ++p)
        if (!used[p]) state.dead_ends.push_back(p);
    return state;
}

} // namespace

std::vector<CoEvent> step_basic(const CoEvent& prev, const Stage& stage_t, const NullSet& nulls,
                                const EngineConfig& config, SynthesisMode mode) {
    const auto family = build_constraints(prev, stage_t, nulls, config);
    std::vector<CoEvent> out;
    for (const auto& s : enumerate_minimal_supports(family, config)) {
        auto part = synthesize_coevents(s, family, mode, config);
        out.insert(out.end(), part.begin(), part.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<CoEvent> step_basic(const CoEvent& prev, const Stage& stage_t, const DecoherenceMatrix& d_t,
                                const EngineConfig& config) {
    return step_basic(prev, stage_t, compute_null_set(d_t, config), config, SynthesisMode::all);
}

std::vector<CoEvent> step_max_affirmative(const CoEvent& prev, const Stage& stage_t,
                                          const DecoherenceMatrix& d_t, const EngineConfig& config) {
    return step_basic(prev, stage_t, compute_null_set(d_t, config), config, SynthesisMode::max_affirmative);
}

std::vector<CoEvent> initial_basic(const Stage& stage0, const NullSet& nulls, const EngineConfig& config,
                                   SynthesisMode mode) {
    const auto family = build_initial_constraints(stage0, nulls, config);
    std::vector<CoEvent> out;
    for (const auto& s : enumerate_minimal_supports(family, config)) {
        auto part = synthesize_coevents(s, family, mode, config);
        out.insert(out.end(), part.begin(), part.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

SchemeState initial_state(Scheme scheme, const Stage& stage0, const DecoherenceMatrix& d0,
                          const EngineConfig& config, SynthesisMode mode) {
    if (stage0.t() != 0 || d0.stage() != 0 || d0.size() != stage0.size()) {
        throw StageMismatchError("initial state needs stage 0 and its matrix");
    }
    std::vector<std::pair<CoEvent, std::size_t>> items;
    if (scheme == Scheme::classical) {
        if (!d0.is_classical(config.null_tolerance)) {
            throw SchemeMisuseError("classical scheme on a non-classical measure at stage 0");
        }
        const Event z = d0.null_histories(config.null_tolerance);
        for (HistoryIndex h = 0; h < stage0.size(); ++h)
            if (!z.test(h)) items.emplace_back(CoEvent::monomial(stage0.single(h)), 0);
    } else {
        const NullSet nulls = compute_null_set(d0, config);
        for (auto& phi : initial_basic(stage0, nulls, config, effective_mode(scheme, mode)))
            items.emplace_back(std::move(phi), 0);
    }
    return assemble(0, scheme, std::move(items), 0, false);
}

SchemeState step_classical(const SchemeState& prev, const Stage& stage_t, const DecoherenceMatrix& d_t,
                           const EngineConfig& config) {
    if (prev.scheme != Scheme::classical) {
        throw SchemeMisuseError("classical step from a " + scheme_name(prev.scheme) + " state");
    }
    if (!d_t.is_classical(config.null_tolerance)) {
        throw SchemeMisuseError("classical scheme on a non-classical measure at stage " +
                                std::to_string(stage_t.t()));
    }
    const Event z = d_t.null_histories(config.null_tolerance);
    std::vector<std::pair<CoEvent, std::size_t>> items;
    for (std::size_t p = 0; p < prev.coevents.size(); ++p) {
        const auto& phi = prev.coevents[p];
        if (phi.monomials().size() != 1 || phi.monomials().front().count() != 1) {
            throw SchemeMisuseError("classical state holds a non-classical co-event");
        }
        const HistoryIndex gamma = phi.monomials().front().first();
        (stage_t.children_of(gamma) - z).for_each([&](HistoryIndex c) {
            items.emplace_back(CoEvent::monomial(stage_t.single(c)), p);
        });
    }
    return assemble(stage_t.t(), Scheme::classical, std::move(items), prev.coevents.size(), true);
}

SchemeState step_global(const SchemeState& prev, const Stage& stage_t, const DecoherenceMatrix& d_t,
                        const EngineConfig& config, SynthesisMode mode) {
    const NullSet nulls = compute_null_set(d_t, config);
    std::vector<ConstraintFamily> families;
    std::vector<std::vector<Event>> supports;
    std::set<Event> all_supports;
    for (const auto& phi : prev.coevents) {
        families.push_back(build_constraints(phi, stage_t, nulls, config));
        supports.push_back(enumerate_minimal_supports(families.back(), config));
        all_supports.insert(supports.back().begin(), supports.back().end());
    }
    // Minimal supports of the union, compared across predecessors.
    auto globally_minimal = [&](const Event& s) {
        for (const auto& other : all_supports)
            if (other != s && other.is_subset_of(s)) return false;
        return true;
    };
    std::vector<std::pair<CoEvent, std::size_t>> items;
    for (std::size_t p = 0; p < families.size(); ++p)
        for (const auto& s : supports[p]) {
            if (!globally_minimal(s)) continue;
            for (auto& phi : synthesize_coevents(s, families[p], mode, config)) items.emplace_back(std::move(phi), p);
        }
    return assemble(stage_t.t(), Scheme::global_minimal, std::move(items), prev.coevents.size(), true);
}

SchemeState step_state(const SchemeState& prev, const Stage& stage_t, const DecoherenceMatrix& d_t,
                       const EngineConfig& config, SynthesisMode mode) {
    if (prev.t + 1 != stage_t.t()) {
        throw StageMismatchError("state of stage " + std::to_string(prev.t) + " cannot step to stage " +
                                 std::to_string(stage_t.t()));
    }
    switch (prev.scheme) {
    case Scheme::classical: return step_classical(prev, stage_t, d_t, config);
    case Scheme::global_minimal: return step_global(prev, stage_t, d_t, config, mode);
    case Scheme::basic:
    case Scheme::max_affirmative: break;
    }
    const NullSet nulls = compute_null_set(d_t, config);
    const SynthesisMode m = effective_mode(prev.scheme, mode);
    std::vector<std::pair<CoEvent, std::size_t>> items;
    for (std::size_t p = 0; p < prev.coevents.size(); ++p)
        for (auto& phi : step_basic(prev.coevents[p], stage_t, nulls, config, m)) items.emplace_back(std::move(phi), p);
    return assemble(stage_t.t(), prev.scheme, std::move(items), prev.coevents.size(), true);
}

std::vector<SupportLink> successor_supports(const SchemeState& prev, const Stage& stage_t,
                                            const DecoherenceMatrix& d_t, const EngineConfig& config) {
    std::vector<SupportLink> out;
    if (prev.scheme == Scheme::classical) {
        const auto next = step_classical(prev, stage_t, d_t, config);
        for (std::size_t i = 0; i < next.size(); ++i)
            out.push_back({support(next.coevents[i]), next.lineage[i].front()});
        return out;
    }
    const NullSet nulls = compute_null_set(d_t, config);
    std::set<Event> all;
    for (std::size_t p = 0; p < prev.coevents.size(); ++p) {
        const auto family = build_constraints(prev.coevents[p], stage_t, nulls, config);
        for (auto& s : enumerate_minimal_supports(family, config)) {
            all.insert(s);
            out.push_back({s, p});
        }
    }
    if (prev.scheme == Scheme::global_minimal) {
        std::erase_if(out, [&](const SupportLink& link) {
            for (const auto& other : all)
                if (other != link.support && other.is_subset_of(link.support)) return true;
            return false;
        });
    }
    return out;
}

std::vector<SchemeState> run(const System& system, Scheme scheme, StageIndex last,
                             const EngineConfig& config, SynthesisMode mode) {
    if (last >= system.size()) {
        throw ValidationError("system has stages 0.." + std::to_string(system.size() - 1) + ", stage " +
                              std::to_string(last) + " requested");
    }
    std::vector<SchemeState> states;
    states.push_back(initial_state(scheme, system.stages[0], system.matrices[0], config, mode));
    for (StageIndex t = 1; t <= last; ++t)
        states.push_back(step_state(states.back(), system.stages[t], system.matrices[t], config, mode));
    return states;
}

WalkPolicy WalkPolicy::replay(std::vector<std::size_t> choices) {
    auto shared = std::make_shared<std::vector<std::size_t>>(std::move(choices));
    return interactive([shared](StageIndex t, const std::vector<CoEvent>&) -> std::size_t {
        if (t >= shared->size()) throw std::out_of_range("no recorded choice for stage " + std::to_string(t));
        return (*shared)[t];
    });
}

std::vector<std::size_t> WalkTranscript::choices() const {
    std::vector<std::size_t> out;
    for (const auto& s : steps) out.push_back(s.chosen);
    return out;
}

WalkTranscript walk(const System& system, Scheme scheme, StageIndex last, const WalkPolicy& policy,
                    const EngineConfig& config, SynthesisMode mode) {
    if (last >= system.size()) {
        throw ValidationError("system has stages 0.." + std::to_string(system.size() - 1) + ", stage " +
                              std::to_string(last) + " requested");
    }
    if (policy.kind == WalkPolicy::Kind::interactive && !policy.chooser) {
        throw SchemeMisuseError("interactive walk without a chooser");
    }
    std::mt19937_64 rng(policy.seed);
    auto choose = [&](StageIndex t, const std::vector<CoEvent>& candidates) -> std::size_t {
        switch (policy.kind) {
        case WalkPolicy::Kind::first: return 0;
        case WalkPolicy::Kind::seeded_random:
            return std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng);
        case WalkPolicy::Kind::interactive: {
            const std::size_t c = policy.chooser(t, candidates);
            if (c >= candidates.size()) {
                throw std::out_of_range("choice " + std::to_string(c) + " out of range at stage " +
                                        std::to_string(t));
            }
            return c;
        }
        }
        return 0;
    };

    WalkTranscript transcript;
    transcript.scheme = scheme;
    // The global scheme needs the full allowed set at every stage.
    SchemeState state = initial_state(scheme, system.stages[0], system.matrices[0], config, mode);
    std::size_t chosen_index = 0;
    for (StageIndex t = 0; t <= last; ++t) {
        std::vector<CoEvent> candidates;
        std::vector<std::size_t> positions;
        if (t == 0) {
            candidates = state.coevents;
            for (std::size_t i = 0; i < candidates.size(); ++i) positions.push_back(i);
        } else if (scheme == Scheme::global_minimal || scheme == Scheme::classical) {
            state = step_state(state, system.stages[t], system.matrices[t], config, mode);
            positions = state.successors_of(chosen_index);
            for (auto i : positions) candidates.push_back(state.coevents[i]);
        } else {
            const CoEvent& prev = transcript.steps.back().expressed();
            candidates = step_basic(prev, system.stages[t], compute_null_set(system.matrices[t], config), config,
                                    effective_mode(scheme, mode));
            for (std::size_t i = 0; i < candidates.size(); ++i) positions.push_back(i);
        }
        if (candidates.empty()) {
            transcript.terminated = true;
            transcript.terminated_at = t;
            break;
        }
        const std::size_t pick = choose(t, candidates);
        chosen_index = positions[pick];
        transcript.steps.push_back({t, std::move(candidates), pick});
    }
    return transcript;
}

} // namespace coevent
