#ifndef COEVENT_SCHEME_HPP
#define COEVENT_SCHEME_HPP

#include "coevent/coevent.hpp"
#include "coevent/config.hpp"
#include "coevent/measure.hpp"
#include "coevent/support_solver.hpp"
#include "coevent/systems.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace coevent {

enum class Scheme { classical, basic, max_affirmative, global_minimal };

std::string scheme_name(Scheme scheme);
// Accepts classical, basic, maxaff, max_affirmative, global, global_minimal.
Scheme parse_scheme(const std::string& name);

/// Allowed co-events at one stage. lineage[i] lists indices into the
/// previous state's co-events that co-event i prolongs.
struct SchemeState {
    StageIndex t = 0;
    Scheme scheme = Scheme::basic;
    std::vector<CoEvent> coevents;
    std::vector<std::vector<std::size_t>> lineage;
    std::vector<std::size_t> dead_ends;  // previous co-events with no successor

    std::size_t size() const { return coevents.size(); }
    // Indices of the co-events that prolong previous co-event `p`.
    std::vector<std::size_t> successors_of(std::size_t p) const;
};

// Minimally supported preclusive prolongations of `prev`.
std::vector<CoEvent> step_basic(const CoEvent& prev, const Stage& stage_t, const NullSet& nulls,
                                const EngineConfig& config, SynthesisMode mode = SynthesisMode::all);
std::vector<CoEvent> step_basic(const CoEvent& prev, const Stage& stage_t, const DecoherenceMatrix& d_t,
                                const EngineConfig& config = {});
std::vector<CoEvent> step_max_affirmative(const CoEvent& prev, const Stage& stage_t,
                                          const DecoherenceMatrix& d_t, const EngineConfig& config = {});
// Minimally supported preclusive co-events affirming Omega_0.
std::vector<CoEvent> initial_basic(const Stage& stage0, const NullSet& nulls, const EngineConfig& config,
                                   SynthesisMode mode = SynthesisMode::all);

SchemeState initial_state(Scheme scheme, const Stage& stage0, const DecoherenceMatrix& d0,
                          const EngineConfig& config = {}, SynthesisMode mode = SynthesisMode::all);
SchemeState step_classical(const SchemeState& prev, const Stage& stage_t, const DecoherenceMatrix& d_t,
                           const EngineConfig& config = {});
SchemeState step_global(const SchemeState& prev, const Stage& stage_t, const DecoherenceMatrix& d_t,
                        const EngineConfig& config = {}, SynthesisMode mode = SynthesisMode::all);
// Dispatches on prev.scheme.
SchemeState step_state(const SchemeState& prev, const Stage& stage_t, const DecoherenceMatrix& d_t,
                       const EngineConfig& config = {}, SynthesisMode mode = SynthesisMode::all);

struct SupportLink {
    Event support;
    std::size_t predecessor = 0;
};

// Supports of the co-events step_state would produce, without synthesizing
// them. Every co-event synthesized on a minimal support has exactly that support.
std::vector<SupportLink> successor_supports(const SchemeState& prev, const Stage& stage_t,
                                            const DecoherenceMatrix& d_t, const EngineConfig& config = {});

// Exhaustive run over stages 0..last.
std::vector<SchemeState> run(const System& system, Scheme scheme, StageIndex last,
                             const EngineConfig& config = {}, SynthesisMode mode = SynthesisMode::all);

struct WalkPolicy {
    enum class Kind { first, seeded_random, interactive };
    using Chooser = std::function<std::size_t(StageIndex, const std::vector<CoEvent>&)>;

    Kind kind = Kind::first;
    std::uint64_t seed = 0;
    Chooser chooser;  // interactive only

    static WalkPolicy first() { return {}; }
    static WalkPolicy seeded_random(std::uint64_t seed) { return {Kind::seeded_random, seed, {}}; }
    static WalkPolicy interactive(Chooser chooser) { return {Kind::interactive, 0, std::move(chooser)}; }
    // Replays recorded choices.
    static WalkPolicy replay(std::vector<std::size_t> choices);
};

struct WalkStep {
    StageIndex t = 0;
    std::vector<CoEvent> candidates;
    std::size_t chosen = 0;

    const CoEvent& expressed() const { return candidates.at(chosen); }
};

struct WalkTranscript {
    Scheme scheme = Scheme::basic;
    std::vector<WalkStep> steps;
    bool terminated = false;  // dead end before the last stage
    StageIndex terminated_at = 0;

    std::vector<std::size_t> choices() const;
};

WalkTranscript walk(const System& system, Scheme scheme, StageIndex last, const WalkPolicy& policy,
                    const EngineConfig& config = {}, SynthesisMode mode = SynthesisMode::all);

} // namespace coevent

#endif
