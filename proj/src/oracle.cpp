#include "coevent/oracle.hpp"

#include "coevent/errors.hpp"
#include "coevent/support_solver.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

namespace coevent {

namespace oracle {

namespace {

void check_scale(std::size_t n) {
    if (n > kMaxHistories) {
        throw OracleScaleError("oracle enumeration needs at most " + std::to_string(kMaxHistories) +
                               " histories, stage has " + std::to_string(n));
    }
}

double direct_frobenius(const DecoherenceMatrix& d) {
    double sum = 0.0;
    for (HistoryIndex i = 0; i < d.size(); ++i)
        for (HistoryIndex j = 0; j < d.size(); ++j) sum += std::norm(d(i, j));
    return std::sqrt(sum);
}

double mask_mu(std::uint32_t mask, const DecoherenceMatrix& d) {
    double sum = 0.0;
    for (HistoryIndex i = 0; i < d.size(); ++i)
        if ((mask >> i) & 1u)
            for (HistoryIndex j = 0; j < d.size(); ++j)
                if ((mask >> j) & 1u) sum += d(i, j).real();
    return sum;
}

// Bit E of the result is set iff event E (as a mask) is null.
std::uint64_t null_bits(const DecoherenceMatrix& d, double tol) {
    const double threshold = tol * direct_frobenius(d);
    const std::uint32_t events = 1u << d.size();
    std::uint64_t out = 0;
    for (std::uint32_t e = 0; e < events; ++e)
        if (std::abs(mask_mu(e, d)) <= threshold) out |= std::uint64_t{1} << e;
    return out;
}

bool parity_value(const CoEvent& phi, std::uint64_t mask) {
    bool v = false;
    for (const auto& m : phi.monomials())
        if ((m.low_word() & ~mask) == 0) v = !v;
    return v;
}

CoEvent from_table(std::uint64_t table, StageIndex stage, std::size_t n) {
    const std::uint32_t events = 1u << n;
    std::vector<Event> terms;
    for (std::uint32_t m = 0; m < events; ++m) {
        bool c = false;
        for (std::uint32_t b = m;; b = (b - 1) & m) {
            if ((table >> b) & 1u) c = !c;
            if (b == 0) break;
        }
        if (c) terms.push_back(Event::from_mask(stage, n, m));
    }
    return CoEvent::from_monomials(stage, n, std::move(terms));
}

std::uint32_t table_support(std::uint64_t table, std::size_t n) {
    const std::uint32_t events = 1u << n;
    std::uint32_t s = 0;
    for (std::size_t g = 0; g < n; ++g)
        for (std::uint32_t e = 0; e < events; ++e)
            if (((table >> e) & 1u) != ((table >> (e ^ (1u << g))) & 1u)) {
                s |= 1u << g;
                break;
            }
    return s;
}

struct Candidate {
    std::uint64_t table;
    std::uint32_t support;
};

std::vector<Candidate> precprol_tables(const std::optional<CoEvent>& prev, const Stage& stage_t,
                                       const DecoherenceMatrix& d_t, double tol) {
    const std::size_t n = stage_t.size();
    check_scale(n);
    const std::uint32_t events = 1u << n;
    const std::uint64_t nulls = null_bits(d_t, tol);
    std::uint64_t ones = 0, zeros = nulls;
    if (!prev) {
        ones |= std::uint64_t{1} << (events - 1);
    } else {
        const std::size_t np = prev->size();
        if (np != stage_t.previous_size() || prev->stage() + 1 != stage_t.t()) {
            throw StageMismatchError("oracle predecessor from the wrong stage");
        }
        std::vector<std::uint32_t> kids(np, 0);
        for (const auto& h : stage_t.histories()) kids[*h.parent] |= 1u << h.index;
        for (std::uint32_t e = 0; e < (1u << np); ++e) {
            std::uint32_t lifted = 0;
            for (std::size_t p = 0; p < np; ++p)
                if ((e >> p) & 1u) lifted |= kids[p];
            (parity_value(*prev, e) ? ones : zeros) |= std::uint64_t{1} << lifted;
        }
    }
    std::vector<Candidate> out;
    if (ones & zeros) return out;
    const std::uint64_t total = std::uint64_t{1} << events;
    for (std::uint64_t f = 0; f < total; ++f)
        if ((f & ones) == ones && (f & zeros) == 0) out.push_back({f, table_support(f, n)});
    return out;
}

std::vector<CoEvent> finish(const std::vector<Candidate>& cands, bool minimal, StageIndex stage, std::size_t n) {
    std::vector<std::uint32_t> supports;
    for (const auto& c : cands) supports.push_back(c.support);
    std::sort(supports.begin(), supports.end());
    supports.erase(std::unique(supports.begin(), supports.end()), supports.end());
    std::vector<CoEvent> out;
    for (const auto& c : cands) {
        if (minimal) {
            const bool beaten = std::any_of(supports.begin(), supports.end(), [&](std::uint32_t s) {
                return s != c.support && (s & ~c.support) == 0;
            });
            if (beaten) continue;
        }
        out.push_back(from_table(c.table, stage, n));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

double direct_mu(const Event& e, const DecoherenceMatrix& d) {
    double sum = 0.0;
    for (HistoryIndex i = 0; i < d.size(); ++i)
        if (e.test(i))
            for (HistoryIndex j = 0; j < d.size(); ++j)
                if (e.test(j)) sum += d(i, j).real();
    return sum;
}

std::vector<CoEvent> scheme_step(const std::optional<CoEvent>& prev, const Stage& stage_t,
                                 const DecoherenceMatrix& d_t, Filter which, double null_tolerance) {
    const auto cands = precprol_tables(prev, stage_t, d_t, null_tolerance);
    return finish(cands, which == Filter::minsupp_precprol, stage_t.t(), stage_t.size());
}

std::vector<CoEvent> global_step(const std::vector<CoEvent>& prevs, const Stage& stage_t,
                                 const DecoherenceMatrix& d_t, double null_tolerance) {
    std::vector<Candidate> all;
    std::set<std::uint64_t> seen;
    for (const auto& p : prevs)
        for (const auto& c : precprol_tables(p, stage_t, d_t, null_tolerance))
            if (seen.insert(c.table).second) all.push_back(c);
    return finish(all, true, stage_t.t(), stage_t.size());
}

std::vector<Event> minimal_transversals(const std::vector<Event>& edges, StageIndex stage, std::size_t size) {
    Event vertices(stage, size);
    for (const auto& e : edges) vertices |= e;
    const auto members = vertices.members();
    if (members.size() > 20) throw OracleScaleError("transversal oracle limited to 20 vertices");
    auto to_event = [&](std::uint32_t m) {
        Event e(stage, size);
        for (std::size_t i = 0; i < members.size(); ++i)
            if ((m >> i) & 1u) e.set(members[i]);
        return e;
    };
    auto hits_all = [&](const Event& s) {
        return std::all_of(edges.begin(), edges.end(), [&](const Event& e) { return e.intersects(s); });
    };
    std::vector<Event> out;
    for (std::uint32_t m = 0; m < (1u << members.size()); ++m) {
        const Event s = to_event(m);
        if (!hits_all(s)) continue;
        bool minimal = true;
        for (std::size_t i = 0; i < members.size() && minimal; ++i)
            if ((m >> i) & 1u) minimal = !hits_all(to_event(m & ~(1u << i)));
        if (minimal) out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Event dependence_support(const CoEvent& phi) {
    const std::size_t n = phi.size();
    if (n > 16) throw OracleScaleError("dependence support limited to 16 histories");
    Event s(phi.stage(), n);
    for (std::size_t g = 0; g < n; ++g)
        for (std::uint64_t e = 0; e < (std::uint64_t{1} << n); ++e)
            if (parity_value(phi, e) != parity_value(phi, e ^ (std::uint64_t{1} << g))) {
                s.set(static_cast<HistoryIndex>(g));
                break;
            }
    return s;
}

CoEvent random_preclusive(const Stage& stage, const DecoherenceMatrix& d, std::mt19937_64& rng,
                          double null_tolerance) {
    const std::size_t n = stage.size();
    check_scale(n);
    const std::uint32_t events = 1u << n;
    std::uint64_t table = rng() & ((events == 64 ? 0 : (std::uint64_t{1} << events)) - 1);
    table &= ~null_bits(d, null_tolerance);
    table |= std::uint64_t{1} << (events - 1);
    return from_table(table, stage.t(), n);
}

} // namespace oracle

// ---------------------------------------------------------------------------

bool TheoremReport::ok() const { return first_failure() == nullptr; }

const TheoremCheck* TheoremReport::first_failure() const {
    for (const auto& c : checks)
        if (!c.passed) return &c;
    return nullptr;
}

std::size_t TheoremReport::count(const std::string& name) const {
    std::size_t n = 0;
    for (const auto& c : checks)
        if (c.name == name) n += c.examined;
    return n;
}

bool TheoremReport::passed(const std::string& name) const {
    bool any = false;
    for (const auto& c : checks)
        if (c.name == name) {
            if (!c.passed) return false;
            any = any || !c.skipped;
        }
    return any;
}

void TheoremReport::append(const TheoremReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

std::string TheoremReport::to_text() const {
    std::ostringstream out;
    for (const auto& c : checks) {
        out << (c.skipped ? "SKIP" : c.passed ? "PASS" : "FAIL") << "  " << c.name << "  t=" << c.t
            << "  examined=" << c.examined;
        if (!c.detail.empty()) out << "  " << c.detail;
        out << "\n";
    }
    return out.str();
}

std::string TheoremReport::to_json() const {
    nlohmann::json j;
    j["ok"] = ok();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        j["checks"].push_back({{"name", c.name},
                               {"t", c.t},
                               {"examined", c.examined},
                               {"passed", c.passed},
                               {"skipped", c.skipped},
                               {"detail", c.detail}});
    }
    return j.dump();
}

namespace {

struct Recorder {
    TheoremCheck check;

    Recorder(std::string name, StageIndex t) { check.name = std::move(name), check.t = t; }
    void examine() { ++check.examined; }
    void fail(const std::string& why) {
        if (check.passed) check.detail = why;
        check.passed = false;
    }
    void skip(const std::string& why) {
        check.skipped = true;
        check.detail = why;
    }
};

Event random_event(StageIndex t, std::size_t n, std::mt19937_64& rng) {
    Event e(t, n);
    for (std::size_t h = 0; h < n; ++h)
        if (rng() & 1u) e.set(static_cast<HistoryIndex>(h));
    return e;
}

std::string label_list(const Event& e, const Stage& stage) {
    std::string out = "{";
    bool first = true;
    e.for_each([&](HistoryIndex h) {
        if (!first) out += ",";
        first = false;
        out += stage.label(h);
    });
    return out + "}";
}

bool bijective_link(const Stage& stage) {
    if (stage.t() == 0 || stage.previous_size() != stage.size()) return false;
    for (HistoryIndex p = 0; p < stage.previous_size(); ++p)
        if (stage.children_of(p).count() != 1) return false;
    return true;
}

CoEvent substitute(const CoEvent& prev, const std::vector<HistoryIndex>& image, const Stage& stage_t) {
    std::vector<Event> terms;
    for (const auto& m : prev.monomials()) {
        Event e = stage_t.empty_event();
        m.for_each([&](HistoryIndex g) { e.set(image[g]); });
        terms.push_back(e);
    }
    return CoEvent::from_monomials(stage_t.t(), stage_t.size(), std::move(terms));
}

// Every e-map substitution of the previous polynomial, or nothing when over budget.
std::optional<std::vector<CoEvent>> emap_substitutions(const CoEvent& prev, const Stage& stage_t, const Event& z,
                                                       std::uint64_t budget) {
    const auto gammas = support(prev).members();
    std::vector<std::vector<HistoryIndex>> options;
    std::uint64_t total = 1;
    for (auto g : gammas) {
        options.push_back((stage_t.children_of(g) - z).members());
        if (options.back().empty()) return std::vector<CoEvent>{};
        if (total > budget / options.back().size()) return std::nullopt;
        total *= options.back().size();
    }
    std::vector<HistoryIndex> image(prev.size(), 0);
    std::vector<CoEvent> out;
    for (std::uint64_t k = 0; k < total; ++k) {
        std::uint64_t rest = k;
        for (std::size_t i = 0; i < gammas.size(); ++i) {
            image[gammas[i]] = options[i][rest % options[i].size()];
            rest /= options[i].size();
        }
        out.push_back(substitute(prev, image, stage_t));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Hypothesis of the structure-preservation result: each null at t is an
// extended null of t-1 up to null histories. Empty when too large to test.
std::optional<bool> nulls_are_extended(const NullSet& now, const NullSet& before, const Stage& stage_t) {
    const Event& z = now.null_histories();
    bool needs_previous = false;
    for (const auto& p : now.reduced()) needs_previous = needs_previous || p.any();
    if (!needs_previous) return true;
    std::vector<Event> previous;
    try {
        previous = before.expand(std::size_t{1} << 16);
    } catch (const BudgetError&) {
        return std::nullopt;
    }
    std::unordered_set<Event> lifted;
    for (const auto& p : previous) lifted.insert(extend_event(p, stage_t) - z);
    for (const auto& p : now.reduced())
        if (!lifted.count(p)) return false;
    return true;
}

} // namespace

TheoremReport check_theorems(const System& system, const std::vector<SchemeState>& states,
                             const EngineConfig& config) {
    TheoremReport report;
    if (states.empty()) return report;
    if (states.size() > system.size()) throw ValidationError("run has more stages than the system");
    const Scheme scheme = states.front().scheme;
    std::mt19937_64 rng(0x5eed);
    std::optional<NullSet> previous_nulls;

    for (std::size_t k = 0; k < states.size(); ++k) {
        const SchemeState& state = states[k];
        const StageIndex t = state.t;
        const Stage& stage = system.stages[t];
        const DecoherenceMatrix& d = system.matrices[t];
        const NullSet nulls = compute_null_set(d, config);
        const Event z = d.null_histories(config.null_tolerance);

        Recorder excl("null_history_exclusion", t), prec("preclusive", t), wit("null_witness", t),
            separation("affirm_deny_separation", t), expand("expansion", t);
        for (const auto& phi : state.coevents) {
            const std::string text = render(phi, stage);
            const Event s = support(phi);
            excl.examine();
            if (s.intersects(z)) {
                excl.fail(text + " has null histories " + label_list(s * z, stage) + " in its support");
            }

            if (s.count() <= 20) {
                const LocalDomain dom(s);
                const auto table = truth_table_on(phi, dom);
                const auto marks = nulls.trace_marks(dom);
                prec.examine();
                for (std::uint64_t m = 0; m < marks.size(); ++m)
                    if (marks[m] && table[m]) {
                        prec.fail(text + " affirms the null event meeting its support in " +
                                  label_list(dom.to_event(m), stage));
                        break;
                    }
                for (std::size_t i = 0; i < dom.size(); ++i) {
                    wit.examine();
                    const std::uint64_t bit = std::uint64_t{1} << i;
                    bool found = false;
                    for (std::uint64_t m = 0; m < marks.size() && !found; ++m)
                        found = marks[m] && table[m] != table[m ^ bit];
                    if (!found) {
                        wit.fail(text + ": no null event Q with nonzero difference at " +
                                 stage.label(dom.members()[i]));
                    }
                }
            }

            const std::size_t n = stage.size();
            const bool exhaustive = n <= 5;
            const std::size_t pairs = exhaustive ? (std::size_t{1} << (2 * n)) : 256;
            for (std::size_t i = 0; i < pairs; ++i) {
                Event a = exhaustive ? Event::from_mask(t, n, i & ((std::uint64_t{1} << n) - 1))
                                     : random_event(t, n, rng);
                Event dd = exhaustive ? Event::from_mask(t, n, i >> n) : random_event(t, n, rng);
                separation.examine();
                if (phi.evaluate(a) != phi.evaluate(dd) && ((a + dd) * s).none()) {
                    separation.fail(text + " separates " + label_list(a, stage) + " and " + label_list(dd, stage) +
                                " outside its support");
                    break;
                }
            }

            const Event x = random_event(t, n, rng);
            const auto terms = expand_around(phi, x);
            const std::size_t samples = n <= 8 ? (std::size_t{1} << n) : 128;
            for (std::size_t i = 0; i < samples; ++i) {
                const Event a = n <= 8 ? Event::from_mask(t, n, i) : random_event(t, n, rng);
                expand.examine();
                if (evaluate_expansion(terms, x, a) != phi.evaluate(a)) {
                    expand.fail(text + ": expansion about " + label_list(x, stage) + " differs at " +
                                label_list(a, stage));
                    break;
                }
            }
        }
        for (auto* r : {&excl, &prec, &wit, &separation, &expand}) report.checks.push_back(r->check);

        if (k > 0) {
            const SchemeState& prev = states[k - 1];
            Recorder prol("prolongation_structure", t), mono("monotone_support", t);
            for (std::size_t i = 0; i < state.coevents.size(); ++i) {
                const auto& phi = state.coevents[i];
                if (state.lineage[i].empty()) {
                    prol.fail(render(phi, stage) + " has no predecessor");
                    continue;
                }
                for (auto p : state.lineage[i]) {
                    prol.examine();
                    mono.examine();
                    const auto structure = check_prolongation_structure(phi, prev.coevents[p], stage);
                    if (!structure.is_prolongation) {
                        prol.fail(render(phi, stage) + " does not restrict to its predecessor (" +
                                  std::to_string(structure.leftover.size()) + " leftover, " +
                                  std::to_string(structure.missing.size()) + " missing monomials)");
                    }
                    if (support(phi).count() < support(prev.coevents[p]).count()) {
                        mono.fail(render(phi, stage) + " has a smaller support than its predecessor");
                    }
                }
            }
            report.checks.push_back(prol.check);
            report.checks.push_back(mono.check);

            if (bijective_link(stage)) {
                Recorder copy("copied_stage", t);
                std::vector<HistoryIndex> image(stage.previous_size());
                for (HistoryIndex p = 0; p < stage.previous_size(); ++p) image[p] = stage.children_of(p).first();
                for (std::size_t p = 0; p < prev.coevents.size(); ++p) {
                    copy.examine();
                    const auto succ = state.successors_of(p);
                    const CoEvent expected = substitute(prev.coevents[p], image, stage);
                    if (succ.size() != 1 || state.coevents[succ.front()] != expected) {
                        copy.fail("predecessor " + std::to_string(p) + " has " + std::to_string(succ.size()) +
                                  " successors instead of its copy " + render(expected, stage));
                    }
                }
                report.checks.push_back(copy.check);
            }

            if (scheme != Scheme::classical && previous_nulls) {
                Recorder nnp("no_new_preclusions", t);
                const auto hypothesis = nulls_are_extended(nulls, *previous_nulls, stage);
                if (!hypothesis) {
                    nnp.skip("previous null set too large to test the hypothesis");
                } else if (!*hypothesis) {
                    nnp.skip("new null events at this stage; hypothesis does not hold");
                } else {
                    for (std::size_t p = 0; p < prev.coevents.size(); ++p) {
                        const auto expected = emap_substitutions(prev.coevents[p], stage, z, config.coevent_budget);
                        if (!expected) {
                            nnp.skip("extension maps exceed the co-event budget");
                            break;
                        }
                        nnp.examine();
                        std::vector<CoEvent> got;
                        for (auto i : state.successors_of(p)) got.push_back(state.coevents[i]);
                        const bool ok = scheme == Scheme::global_minimal
                                            ? std::includes(expected->begin(), expected->end(), got.begin(), got.end())
                                            : got == *expected;
                        if (!ok) {
                            nnp.fail("successors of " + render(prev.coevents[p], system.stages[t - 1]) + ": " +
                                     std::to_string(got.size()) + " produced, " + std::to_string(expected->size()) +
                                     " substitutions expected");
                        }
                    }
                }
                report.checks.push_back(nnp.check);
            }
        }
        previous_nulls = nulls;
    }

    if (scheme != Scheme::classical) {
        bool classical = true;
        for (std::size_t k = 0; k < states.size(); ++k)
            classical = classical && system.matrices[states[k].t].is_classical(config.null_tolerance);
        if (classical) {
            const auto reference = run(system, Scheme::classical, states.back().t, config);
            for (std::size_t k = 0; k < states.size(); ++k) {
                Recorder red("classical_reduction", states[k].t);
                red.examine();
                if (states[k].coevents != reference[k].coevents) {
                    red.fail(std::to_string(states[k].size()) + " co-events against " +
                             std::to_string(reference[k].size()) + " classical ones");
                }
                report.checks.push_back(red.check);
            }
        }
    }
    return report;
}

namespace {

bool equal_or_subset(Scheme scheme, const std::vector<CoEvent>& engine, const std::vector<CoEvent>& brute) {
    if (scheme != Scheme::max_affirmative) return engine == brute;
    if (!std::includes(brute.begin(), brute.end(), engine.begin(), engine.end())) return false;
    std::set<Event> a, b;
    for (const auto& phi : engine) a.insert(support(phi));
    for (const auto& phi : brute) b.insert(support(phi));
    return a == b && a.size() == engine.size();
}

} // namespace

TheoremReport check_oracle_equivalence(const System& system, Scheme scheme, StageIndex last,
                                       const EngineConfig& config, std::size_t samples, std::uint64_t seed) {
    TheoremReport report;
    if (last >= system.size()) throw ValidationError("oracle check past the last stage");
    StageIndex top = 0;
    while (top + 1 <= last && system.stages[top + 1].size() <= oracle::kMaxHistories) ++top;
    if (system.stages[0].size() > oracle::kMaxHistories) {
        Recorder r("oracle_equivalence", 0);
        r.skip("no stage with at most " + std::to_string(oracle::kMaxHistories) + " histories");
        report.checks.push_back(r.check);
        return report;
    }
    if (scheme == Scheme::classical) {
        for (StageIndex t = 0; t <= top; ++t)
            if (!system.matrices[t].is_classical(config.null_tolerance)) top = t == 0 ? 0 : t - 1;
        if (!system.matrices[0].is_classical(config.null_tolerance)) {
            Recorder r("oracle_equivalence", 0);
            r.skip("classical scheme needs a classical measure");
            report.checks.push_back(r.check);
            return report;
        }
    }
    const auto states = run(system, scheme, top, config);
    const SynthesisMode mode =
        scheme == Scheme::max_affirmative ? SynthesisMode::max_affirmative : SynthesisMode::all;
    std::mt19937_64 rng(seed);
    const double tol = config.null_tolerance;

    for (StageIndex t = 0; t <= top; ++t) {
        Recorder r("oracle_equivalence", t);
        const Stage& stage = system.stages[t];
        const auto& d = system.matrices[t];
        if (t == 0) {
            r.examine();
            const auto brute = oracle::scheme_step(std::nullopt, stage, d, oracle::Filter::minsupp_precprol, tol);
            if (!equal_or_subset(scheme, states[0].coevents, brute)) {
                r.fail("initial stage: engine " + std::to_string(states[0].size()) + " co-events, oracle " +
                       std::to_string(brute.size()));
            }
            report.checks.push_back(r.check);
            continue;
        }
        const Stage& before = system.stages[t - 1];
        const auto& d_before = system.matrices[t - 1];
        const NullSet nulls = compute_null_set(d, config);

        if (scheme == Scheme::global_minimal) {
            std::vector<std::vector<CoEvent>> sets{states[t - 1].coevents};
            for (std::size_t i = 0; i < samples; ++i) {
                std::vector<CoEvent> prevs;
                const std::size_t count = 1 + rng() % 3;
                for (std::size_t j = 0; j < count; ++j) prevs.push_back(oracle::random_preclusive(before, d_before, rng, tol));
                std::sort(prevs.begin(), prevs.end());
                prevs.erase(std::unique(prevs.begin(), prevs.end()), prevs.end());
                sets.push_back(prevs);
            }
            for (const auto& prevs : sets) {
                r.examine();
                SchemeState prev_state;
                prev_state.t = t - 1;
                prev_state.scheme = Scheme::global_minimal;
                prev_state.coevents = prevs;
                const auto engine = step_global(prev_state, stage, d, config, mode);
                const auto brute = oracle::global_step(prevs, stage, d, tol);
                if (engine.coevents != brute) {
                    r.fail("global step from " + std::to_string(prevs.size()) + " predecessors: engine " +
                           std::to_string(engine.size()) + ", oracle " + std::to_string(brute.size()));
                    break;
                }
            }
        } else {
            std::vector<CoEvent> prevs = states[t - 1].coevents;
            for (std::size_t i = 0; i < samples; ++i) prevs.push_back(oracle::random_preclusive(before, d_before, rng, tol));
            for (const auto& prev : prevs) {
                r.examine();
                const auto brute = oracle::scheme_step(prev, stage, d, oracle::Filter::minsupp_precprol, tol);
                std::vector<CoEvent> engine;
                if (scheme == Scheme::classical) {
                    SchemeState single;
                    single.t = t - 1;
                    single.scheme = Scheme::classical;
                    single.coevents = {prev};
                    if (prev.monomials().size() != 1 || prev.monomials().front().count() != 1) continue;
                    engine = step_classical(single, stage, d, config).coevents;
                } else {
                    engine = step_basic(prev, stage, nulls, config, mode);
                }
                if (!equal_or_subset(scheme, engine, brute)) {
                    r.fail("from " + render(prev, before) + ": engine " + std::to_string(engine.size()) +
                           " co-events, oracle " + std::to_string(brute.size()));
                    break;
                }
            }
        }
        report.checks.push_back(r.check);
    }
    return report;
}

} // namespace coevent
