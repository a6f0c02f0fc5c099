#include "coevent/support_solver.hpp"

#include "coevent/errors.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

namespace coevent {

namespace {

constexpr std::size_t kMaxLocal = 26;

void check_local(std::size_t k, const char* what) {
    if (k > kMaxLocal) {
        throw BudgetError(std::string(what) + " over " + std::to_string(k) +
                          " histories exceeds the 2^" + std::to_string(kMaxLocal) + " table limit");
    }
}

void walsh_hadamard(std::vector<std::int64_t>& v, bool inverse) {
    const std::size_t n = v.size();
    for (std::size_t len = 1; len < n; len <<= 1)
        for (std::size_t i = 0; i < n; i += len << 1)
            for (std::size_t j = i; j < i + len; ++j) {
                const std::int64_t a = v[j], b = v[j + len];
                v[j] = a + b;
                v[j + len] = a - b;
            }
    if (inverse)
        for (auto& x : v) x /= static_cast<std::int64_t>(n);
}

// Masks with mark set and no marked proper subset.
std::vector<std::uint64_t> minimal_masks(const std::vector<std::uint8_t>& mark, std::size_t k) {
    std::vector<std::uint8_t> below(mark);
    for (std::size_t bit = 0; bit < k; ++bit) {
        const std::uint64_t b = std::uint64_t{1} << bit;
        for (std::uint64_t x = 0; x < below.size(); ++x)
            if (x & b) below[x] |= below[x ^ b];
    }
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = 0; x < mark.size(); ++x) {
        if (!mark[x]) continue;
        bool minimal = true;
        for (std::uint64_t rest = x; rest && minimal; rest &= rest - 1) {
            const std::uint64_t b = rest & (~rest + 1);
            if (below[x ^ b]) minimal = false;
        }
        if (minimal) out.push_back(x);
    }
    return out;
}

void throw_inconsistent(const Stage& stage_t) {
    throw InconsistentConstraintsError(
        "stage " + std::to_string(stage_t.t()) +
        ": an event must be both affirmed and denied (the previous co-event is not preclusive)");
}

} // namespace

std::vector<Event> minimize_family(std::vector<Event> events) {
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        const auto ca = a.count(), cb = b.count();
        return ca != cb ? ca < cb : a < b;
    });
    events.erase(std::unique(events.begin(), events.end()), events.end());
    std::vector<Event> kept;
    for (const auto& e : events) {
        bool dominated = false;
        for (const auto& k : kept)
            if (k.is_subset_of(e)) {
                dominated = true;
                break;
            }
        if (!dominated) kept.push_back(e);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

ConstraintFamily build_initial_constraints(const Stage& stage0, const NullSet& nulls,
                                           const EngineConfig& config) {
    if (nulls.stage_size() != stage0.size()) {
        throw StageMismatchError("null set does not belong to stage " + std::to_string(stage0.t()));
    }
    if (nulls.reduced().size() > config.pair_budget) {
        throw BudgetError("initial constraint pairs exceed the pair budget");
    }
    const Event rest = stage0.full_event() - nulls.null_histories();
    std::vector<Event> diffs;
    for (const auto& p : nulls.reduced()) {
        Event d = rest + p;
        if (d.none()) throw_inconsistent(stage0);
        diffs.push_back(d);
    }
    return ConstraintFamily{stage0, std::nullopt, nulls, minimize_family(std::move(diffs))};
}

ConstraintFamily build_constraints(const CoEvent& prev, const Stage& stage_t, const NullSet& nulls,
                                   const EngineConfig& config) {
    if (stage_t.t() == 0) throw NoPredecessorError("stage 0 has no previous co-event");
    if (prev.stage() + 1 != stage_t.t() || prev.size() != stage_t.previous_size()) {
        throw StageMismatchError("previous co-event of stage " + std::to_string(prev.stage()) +
                                 " does not precede stage " + std::to_string(stage_t.t()));
    }
    if (nulls.stage_size() != stage_t.size()) {
        throw StageMismatchError("null set does not belong to stage " + std::to_string(stage_t.t()));
    }
    const Event z = nulls.null_histories();
    const LocalDomain sdom(support(prev));
    const std::size_t k = sdom.size();
    check_local(k, "previous support");
    const auto table = truth_table_on(prev, sdom);
    const std::size_t cells = table.size();
    if (cells > config.pair_budget) throw BudgetError("previous support too large for the pair budget");

    std::vector<Event> diffs;

    // Prolongation affirm against prolongation deny: T+(A') + T+(D') = T+(A' + D'),
    // and both values depend only on the part inside the previous support.
    {
        std::vector<std::int64_t> yes(cells), no(cells);
        for (std::size_t x = 0; x < cells; ++x) {
            yes[x] = table[x];
            no[x] = 1 - table[x];
        }
        walsh_hadamard(yes, false);
        walsh_hadamard(no, false);
        for (std::size_t x = 0; x < cells; ++x) yes[x] *= no[x];
        walsh_hadamard(yes, true);
        std::vector<std::uint8_t> mark(cells);
        for (std::size_t x = 0; x < cells; ++x) mark[x] = yes[x] > 0;
        if (mark[0]) throw_inconsistent(stage_t);
        for (auto x : minimal_masks(mark, k)) diffs.push_back(extend_event(sdom.to_event(x), stage_t));
    }

    // Prolongation affirm against null: minimal A + P is (A \ Z) + P_r with P_r a reduced null.
    if (nulls.is_classical()) {
        std::vector<Event> lifted;
        for (std::size_t x = 0; x < cells; ++x) {
            if (!table[x]) continue;
            Event d = extend_event(sdom.to_event(x), stage_t) - z;
            if (d.none()) throw_inconsistent(stage_t);
            lifted.push_back(d);
        }
        auto m = minimize_family(std::move(lifted));
        diffs.insert(diffs.end(), m.begin(), m.end());
    } else {
        const std::size_t np = stage_t.previous_size();
        if (np > 62) throw BudgetError("previous stage too large for explicit null pairing");
        const std::uint64_t total = std::uint64_t{1} << np;
        if (total > config.pair_budget / std::max<std::size_t>(1, nulls.reduced().size())) {
            throw BudgetError("affirm/null pairs exceed the pair budget of " +
                              std::to_string(config.pair_budget));
        }
        std::unordered_set<Event> seen;
        Event prev_event(prev.stage(), np);
        Event lifted = stage_t.empty_event();
        for (std::uint64_t i = 0;; ++i) {
            if (prev.evaluate(prev_event)) {
                const Event a = lifted - z;
                for (const auto& p : nulls.reduced()) {
                    Event d = a + p;
                    if (d.none()) throw_inconsistent(stage_t);
                    seen.insert(d);
                }
            }
            if (i + 1 == total) break;
            const auto bit = static_cast<HistoryIndex>(std::countr_zero(i + 1));
            prev_event.flip(bit);
            lifted += stage_t.children_of(bit);
        }
        auto m = minimize_family(std::vector<Event>(seen.begin(), seen.end()));
        diffs.insert(diffs.end(), m.begin(), m.end());
    }
    return ConstraintFamily{stage_t, prev, nulls, minimize_family(std::move(diffs))};
}

std::vector<Event> ConstraintFamily::affirm_events(std::size_t max_previous) const {
    if (is_initial()) return {stage.full_event()};
    const std::size_t np = stage.previous_size();
    if (np > max_previous) throw BudgetError("explicit affirm list over too many previous histories");
    std::vector<Event> out;
    const LocalDomain all(Event::full(previous->stage(), np));
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << np); ++m) {
        const Event a = all.to_event(m);
        if (previous->evaluate(a)) out.push_back(extend_event(a, stage));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Event> ConstraintFamily::deny_events(std::size_t max_previous) const {
    std::vector<Event> out = nulls.expand();
    if (!is_initial()) {
        const std::size_t np = stage.previous_size();
        if (np > max_previous) throw BudgetError("explicit deny list over too many previous histories");
        const LocalDomain all(Event::full(previous->stage(), np));
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << np); ++m) {
            const Event d = all.to_event(m);
            if (!previous->evaluate(d)) out.push_back(extend_event(d, stage));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool is_valid_support(const Event& s, const ConstraintFamily& family) {
    for (const auto& d : family.differences)
        if (!d.intersects(s)) return false;
    return true;
}

bool has_witnesses(const Event& s, const std::vector<Event>& differences) {
    bool ok = true;
    s.for_each([&](HistoryIndex h) {
        if (!ok) return;
        const Event single = Event::single(s.stage(), s.size(), h);
        ok = std::any_of(differences.begin(), differences.end(),
                         [&](const Event& d) { return (d * s) == single; });
    });
    return ok;
}

namespace {

// Minimal-transversal enumeration (Murakami and Uno's MMCS).
class TransversalSearch {
public:
    TransversalSearch(const std::vector<Event>& edges, std::size_t max_results)
        : edges_(edges), max_results_(max_results) {}

    void run(const Event& empty) {
        Event cand = empty;
        for (const auto& e : edges_) cand |= e;
        std::vector<std::size_t> uncovered(edges_.size());
        for (std::size_t i = 0; i < edges_.size(); ++i) uncovered[i] = i;
        std::vector<HistoryIndex> chosen;
        std::vector<std::vector<std::size_t>> crit;
        recurse(empty, chosen, crit, cand, uncovered);
    }

    std::vector<Event> results;

private:
    void recurse(const Event& s, std::vector<HistoryIndex>& chosen,
                 std::vector<std::vector<std::size_t>>& crit, Event& cand,
                 const std::vector<std::size_t>& uncovered) {
        if (uncovered.empty()) {
            results.push_back(s);
            if (results.size() > max_results_) {
                throw BudgetError("more than " + std::to_string(max_results_) + " minimal supports");
            }
            return;
        }
        std::size_t best = uncovered.front();
        std::size_t best_count = SIZE_MAX;
        for (auto i : uncovered) {
            const std::size_t c = (edges_[i] * cand).count();
            if (c < best_count) {
                best_count = c;
                best = i;
            }
        }
        const Event branch = edges_[best] * cand;
        cand -= branch;
        for (HistoryIndex v : branch.members()) {
            std::vector<std::vector<std::size_t>> next_crit(crit.size());
            bool viable = true;
            for (std::size_t u = 0; u < crit.size() && viable; ++u) {
                for (auto i : crit[u])
                    if (!edges_[i].test(v)) next_crit[u].push_back(i);
                viable = !next_crit[u].empty();
            }
            if (viable) {
                std::vector<std::size_t> own, rest;
                for (auto i : uncovered) (edges_[i].test(v) ? own : rest).push_back(i);
                next_crit.push_back(std::move(own));
                Event next = s;
                next.set(v);
                chosen.push_back(v);
                recurse(next, chosen, next_crit, cand, rest);
                chosen.pop_back();
            }
            cand.set(v);
        }
    }

    const std::vector<Event>& edges_;
    std::size_t max_results_;
};

} // namespace

std::vector<Event> minimal_transversals(const std::vector<Event>& edges, StageIndex stage,
                                        std::size_t size, std::size_t max_results) {
    const Event empty(stage, size);
    for (const auto& e : edges) {
        if (e.stage() != stage || e.size() != size) throw StageMismatchError("edge from another stage");
        if (e.none()) return {};  // nothing hits the empty edge
    }
    if (edges.empty()) return {empty};
    const auto family = minimize_family(edges);
    TransversalSearch search(family, max_results);
    search.run(empty);
    std::vector<Event> out;
    for (auto& s : search.results)
        if (has_witnesses(s, family)) out.push_back(s);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Event> enumerate_minimal_supports(const ConstraintFamily& family,
                                              const EngineConfig& config) {
    return minimal_transversals(family.differences, family.t(), family.stage.size(),
                                config.coevent_budget);
}

std::size_t TraceTable::free_count() const {
    return static_cast<std::size_t>(std::count(forced.begin(), forced.end(), std::int8_t{-1}));
}

TraceTable compute_traces(const Event& s, const ConstraintFamily& family, const EngineConfig& config) {
    const Stage& stage_t = family.stage;
    if (s.stage() != stage_t.t() || s.size() != stage_t.size()) {
        throw StageMismatchError("support from another stage");
    }
    if (s.count() > config.max_support_size) {
        throw BudgetError("support of " + std::to_string(s.count()) + " histories exceeds the cap of " +
                          std::to_string(config.max_support_size));
    }
    TraceTable out{LocalDomain(s), {}};
    const std::size_t k = out.domain.size();
    check_local(k, "support");
    out.forced.assign(std::size_t{1} << k, -1);

    auto force = [&](std::uint64_t trace, std::int8_t value) {
        auto& cell = out.forced[trace];
        if (cell != -1 && cell != value) {
            throw InvalidSupportError("support " + s.index_string() + " at stage " +
                                      std::to_string(stage_t.t()) +
                                      " has a trace that is both affirmed and denied");
        }
        cell = value;
    };

    const auto null_marks = family.nulls.trace_marks(out.domain);
    for (std::uint64_t m = 0; m < null_marks.size(); ++m)
        if (null_marks[m]) force(m, 0);

    if (family.is_initial()) {
        force(out.domain.to_local(s), 1);
        return out;
    }

    const CoEvent& prev = *family.previous;
    const Event prev_support = support(prev);
    const LocalDomain sdom(prev_support);
    const auto prev_table = truth_table_on(prev, sdom);
    const LocalDomain rdom(prev_support | restrict_event(s, stage_t));
    const std::size_t r = rdom.size();
    check_local(r, "trace domain");
    if ((std::uint64_t{1} << r) > config.pair_budget) {
        throw BudgetError("trace enumeration exceeds the pair budget");
    }
    std::vector<std::uint64_t> trace_bit(r), support_bit(r);
    for (std::size_t i = 0; i < r; ++i) {
        const HistoryIndex p = rdom.members()[i];
        trace_bit[i] = out.domain.to_local(stage_t.children_of(p) * s);
        support_bit[i] = prev_support.test(p) ? sdom.to_local(Event::single(prev.stage(), prev.size(), p)) : 0;
    }
    // Children of distinct parents are disjoint, so unions are XORs along a Gray code.
    std::uint64_t trace = 0, local_prev = 0;
    const std::uint64_t total = std::uint64_t{1} << r;
    for (std::uint64_t i = 0;; ++i) {
        force(trace, prev_table[local_prev] ? 1 : 0);
        if (i + 1 == total) break;
        const int bit = std::countr_zero(i + 1);
        trace ^= trace_bit[bit];
        local_prev ^= support_bit[bit];
    }
    return out;
}

std::vector<CoEvent> synthesize_coevents(const Event& s, const ConstraintFamily& family,
                                         SynthesisMode mode, const EngineConfig& config) {
    const TraceTable traces = compute_traces(s, family, config);
    std::vector<std::uint64_t> free_cells;
    for (std::uint64_t m = 0; m < traces.forced.size(); ++m)
        if (traces.forced[m] == -1) free_cells.push_back(m);

    std::vector<std::uint8_t> base(traces.forced.size());
    for (std::size_t m = 0; m < base.size(); ++m) base[m] = traces.forced[m] == 1;

    std::uint64_t assignments = 1;
    if (mode == SynthesisMode::all) {
        if (free_cells.size() >= 63 || (std::uint64_t{1} << free_cells.size()) > config.coevent_budget) {
            throw BudgetError(std::to_string(free_cells.size()) + " free traces on support " +
                              s.index_string() + " exceed the co-event budget");
        }
        assignments = std::uint64_t{1} << free_cells.size();
    } else {
        for (auto m : free_cells) base[m] = 1;
    }

    std::vector<CoEvent> out;
    out.reserve(assignments);
    for (std::uint64_t a = 0; a < assignments; ++a) {
        std::vector<std::uint8_t> table = base;
        if (mode == SynthesisMode::all)
            for (std::size_t i = 0; i < free_cells.size(); ++i) table[free_cells[i]] = (a >> i) & 1u;
        CoEvent phi = from_truth_table_on(table, traces.domain);
        if (support(phi) != s) {
            throw InvalidSupportError("support " + s.index_string() + " at stage " +
                                      std::to_string(s.stage()) +
                                      " is not minimal: a synthesized co-event depends on fewer histories");
        }
        out.push_back(std::move(phi));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace coevent
