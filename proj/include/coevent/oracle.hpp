#ifndef COEVENT_ORACLE_HPP
#define COEVENT_ORACLE_HPP

#include "coevent/coevent.hpp"
#include "coevent/config.hpp"
#include "coevent/measure.hpp"
#include "coevent/scheme.hpp"
#include "coevent/systems.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace coevent {

/// Brute-force references over all 2^(2^N) co-events of a stage with N <= 4.
/// They share no code path with the solver beyond the value types.
namespace oracle {

constexpr std::size_t kMaxHistories = 4;

enum class Filter { precprol, minsupp_precprol };

// mu(E) as a plain double sum.
double direct_mu(const Event& e, const DecoherenceMatrix& d);

// `prev` absent means the initial condition (affirm Omega_0).
std::vector<CoEvent> scheme_step(const std::optional<CoEvent>& prev, const Stage& stage_t,
                                 const DecoherenceMatrix& d_t, Filter which, double null_tolerance = 1e-9);

// MinSupp over the union of the preclusive prolongations of every co-event in `prevs`.
std::vector<CoEvent> global_step(const std::vector<CoEvent>& prevs, const Stage& stage_t,
                                 const DecoherenceMatrix& d_t, double null_tolerance = 1e-9);

// Minimal transversals by subset enumeration (at most 20 histories).
std::vector<Event> minimal_transversals(const std::vector<Event>& edges, StageIndex stage, std::size_t size);

// Support as the set of histories the co-event's values depend on.
Event dependence_support(const CoEvent& phi);

// Uniformly random preclusive co-event affirming Omega.
CoEvent random_preclusive(const Stage& stage, const DecoherenceMatrix& d, std::mt19937_64& rng,
                          double null_tolerance = 1e-9);

} // namespace oracle

struct TheoremCheck {
    std::string name;
    StageIndex t = 0;
    std::size_t examined = 0;
    bool passed = true;
    bool skipped = false;
    std::string detail;  // counterexample on failure, reason when skipped
};

struct TheoremReport {
    std::vector<TheoremCheck> checks;

    bool ok() const;
    const TheoremCheck* first_failure() const;
    std::size_t count(const std::string& name) const;
    bool passed(const std::string& name) const;
    std::string to_text() const;
    std::string to_json() const;
    void append(const TheoremReport& other);
};

// Checks every produced co-event at every stage of an exhaustive run.
TheoremReport check_theorems(const System& system, const std::vector<SchemeState>& states,
                             const EngineConfig& config = {});

// Engine against brute force on every stage with at most four histories.
// Each such stage t > 0 is tested from the run's own predecessors and from
// `samples` random preclusive predecessors.
TheoremReport check_oracle_equivalence(const System& system, Scheme scheme, StageIndex last,
                                       const EngineConfig& config = {}, std::size_t samples = 20,
                                       std::uint64_t seed = 1);

} // namespace coevent

#endif
