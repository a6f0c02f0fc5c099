#ifndef COEVENT_SUPPORT_SOLVER_HPP
#define COEVENT_SUPPORT_SOLVER_HPP

#include "coevent/coevent.hpp"
#include "coevent/config.hpp"
#include "coevent/measure.hpp"
#include "coevent/stage.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace coevent {

/// Constraints on the preclusive prolongations of one previous co-event.
///
/// The must-affirm events are {T+(A') : prev(A') = 1} and the must-deny
/// events are the nulls plus {T+(D') : prev(D') = 0}. Both lists are
/// exponential in the stage size, so they are kept implicitly through their
/// generator (`previous`, `stage`, `nulls`); only the minimized family of
/// differences A + D is stored. With no previous co-event the family is the
/// initial one: affirm {Omega_0}, deny the nulls.
struct ConstraintFamily {
    Stage stage;
    std::optional<CoEvent> previous;
    NullSet nulls;
    std::vector<Event> differences;  // antichain, sorted by bitmask

    StageIndex t() const { return stage.t(); }
    bool is_initial() const { return !previous.has_value(); }

    // Explicit lists, for small stages only.
    std::vector<Event> affirm_events(std::size_t max_previous = 16) const;
    std::vector<Event> deny_events(std::size_t max_previous = 16) const;
};

// Inclusion-minimal members of `events`, sorted, without duplicates.
std::vector<Event> minimize_family(std::vector<Event> events);

ConstraintFamily build_constraints(const CoEvent& prev, const Stage& stage_t, const NullSet& nulls,
                                   const EngineConfig& config);
// Stage 0.
ConstraintFamily build_initial_constraints(const Stage& stage0, const NullSet& nulls,
                                           const EngineConfig& config);

bool is_valid_support(const Event& s, const ConstraintFamily& family);

// Minimal transversals of `edges`, sorted by bitmask. An empty family gives {0}.
std::vector<Event> minimal_transversals(const std::vector<Event>& edges, StageIndex stage,
                                        std::size_t size, std::size_t max_results = SIZE_MAX);

std::vector<Event> enumerate_minimal_supports(const ConstraintFamily& family,
                                              const EngineConfig& config = {});

// For every history of `s` some difference meets `s` in exactly that history.
bool has_witnesses(const Event& s, const std::vector<Event>& differences);

enum class SynthesisMode { all, max_affirmative };

/// Value table of the prolongations on the subsets of a support:
/// 1 and 0 where forced by affirm and deny events, -1 where free.
struct TraceTable {
    LocalDomain domain;
    std::vector<std::int8_t> forced;

    std::size_t free_count() const;
};

TraceTable compute_traces(const Event& s, const ConstraintFamily& family, const EngineConfig& config);

std::vector<CoEvent> synthesize_coevents(const Event& s, const ConstraintFamily& family,
                                         SynthesisMode mode, const EngineConfig& config = {});

} // namespace coevent

#endif
