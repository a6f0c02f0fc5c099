#include "coevent/coevent.hpp"

#include "coevent/errors.hpp"

#include <algorithm>
#include <map>

namespace coevent {

namespace {

// Sorts and removes pairs of equal monomials.
std::vector<Event> cancel_pairs(std::vector<Event> items) {
    std::sort(items.begin(), items.end());
    std::vector<Event> out;
    out.reserve(items.size());
    for (std::size_t i = 0; i < items.size();) {
        std::size_t j = i;
        while (j < items.size() && items[j] == items[i]) ++j;
        if ((j - i) % 2 == 1) out.push_back(items[i]);
        i = j;
    }
    return out;
}

} // namespace

CoEvent CoEvent::one(StageIndex stage, std::size_t size) {
    CoEvent c(stage, size);
    c.monomials_.push_back(Event(stage, size));
    return c;
}

CoEvent CoEvent::monomial(const Event& e) {
    CoEvent c(e.stage(), e.size());
    c.monomials_.push_back(e);
    return c;
}

CoEvent CoEvent::classical(StageIndex stage, std::size_t size, HistoryIndex h) {
    return monomial(Event::single(stage, size, h));
}

CoEvent CoEvent::from_monomials(StageIndex stage, std::size_t size, std::vector<Event> monomials) {
    CoEvent c(stage, size);
    for (const auto& m : monomials) {
        if (m.stage() != stage || m.size() != size) {
            throw StageMismatchError("monomial of stage " + std::to_string(m.stage()) +
                                     " in a co-event of stage " + std::to_string(stage));
        }
    }
    c.monomials_ = std::move(monomials);
    c.canonicalize();
    return c;
}

void CoEvent::canonicalize() { monomials_ = cancel_pairs(std::move(monomials_)); }

void CoEvent::check_compatible(const CoEvent& other) const {
    if (stage_ != other.stage_ || size_ != other.size_) {
        throw StageMismatchError("co-events of stage " + std::to_string(stage_) + " and " +
                                 std::to_string(other.stage_) + " cannot be combined");
    }
}

bool CoEvent::evaluate(const Event& a) const {
    if (a.stage() != stage_ || a.size() != size_) {
        throw StageMismatchError("co-event of stage " + std::to_string(stage_) +
                                 " evaluated on an event of stage " + std::to_string(a.stage()));
    }
    bool value = false;
    for (const auto& m : monomials_)
        if (m.is_subset_of(a)) value = !value;
    return value;
}

CoEvent& CoEvent::operator+=(const CoEvent& other) {
    check_compatible(other);
    std::vector<Event> merged;
    merged.reserve(monomials_.size() + other.monomials_.size());
    std::set_symmetric_difference(monomials_.begin(), monomials_.end(), other.monomials_.begin(),
                                  other.monomials_.end(), std::back_inserter(merged));
    monomials_ = std::move(merged);
    return *this;
}

CoEvent operator*(const CoEvent& a, const CoEvent& b) {
    a.check_compatible(b);
    std::vector<Event> products;
    products.reserve(a.monomials_.size() * b.monomials_.size());
    for (const auto& x : a.monomials_)
        for (const auto& y : b.monomials_) products.push_back(x | y);
    CoEvent c(a.stage_, a.size_);
    c.monomials_ = cancel_pairs(std::move(products));
    return c;
}

std::strong_ordering operator<=>(const CoEvent& a, const CoEvent& b) {
    if (auto c = a.stage_ <=> b.stage_; c != 0) return c;
    if (auto c = a.size_ <=> b.size_; c != 0) return c;
    return std::lexicographical_compare_three_way(a.monomials_.begin(), a.monomials_.end(),
                                                  b.monomials_.begin(), b.monomials_.end());
}

CoEvent coevent_ring(const CoEvent& a, const CoEvent& b, CoEventOp op) {
    return op == CoEventOp::add ? a + b : a * b;
}

CoEvent partial_difference(const CoEvent& phi, const Event& x) {
    if (x.stage() != phi.stage() || x.size() != phi.size()) {
        throw StageMismatchError("partial difference by an event of another stage");
    }
    std::vector<Event> terms;
    for (const auto& m : phi.monomials())
        if (x.is_subset_of(m)) terms.push_back(m - x);
    return CoEvent::from_monomials(phi.stage(), phi.size(), std::move(terms));
}

Event support(const CoEvent& phi) {
    Event s(phi.stage(), phi.size());
    for (const auto& m : phi.monomials()) s |= m;
    return s;
}

CoEvent restrict_coevent(const CoEvent& phi, const Stage& stage_t) {
    if (stage_t.t() == 0) throw NoPredecessorError("co-events at stage 0 have no restriction");
    if (phi.stage() != stage_t.t() || phi.size() != stage_t.size()) {
        throw StageMismatchError("co-event of stage " + std::to_string(phi.stage()) +
                                 " restricted through stage " + std::to_string(stage_t.t()));
    }
    std::vector<Event> terms;
    terms.reserve(phi.monomials().size());
    for (const auto& m : phi.monomials()) terms.push_back(restrict_event(m, stage_t));
    return CoEvent::from_monomials(stage_t.t() - 1, stage_t.previous_size(), std::move(terms));
}

std::vector<ExpansionTerm> expand_around(const CoEvent& phi, const Event& x) {
    if (x.stage() != phi.stage() || x.size() != phi.size()) {
        throw StageMismatchError("expansion point from another stage");
    }
    // d(M*)/dE (X) = 1 iff E subset of M and M \ E subset of X, i.e.
    // E = (M \ X) + F for F ranging over the subsets of M.X.
    std::vector<Event> hits;
    for (const auto& m : phi.monomials()) {
        const Event base = m - x;
        const LocalDomain free(m * x);
        const std::uint64_t total = std::uint64_t{1} << free.size();
        for (std::uint64_t f = 0; f < total; ++f) hits.push_back(base | free.to_event(f));
    }
    std::vector<ExpansionTerm> out;
    for (auto& e : cancel_pairs(std::move(hits))) out.push_back({true, e});
    return out;
}

bool evaluate_expansion(const std::vector<ExpansionTerm>& terms, const Event& x, const Event& a) {
    const Event shifted = a + x;
    bool value = false;
    for (const auto& term : terms)
        if (term.coefficient && term.monomial.is_subset_of(shifted)) value = !value;
    return value;
}

CoEvent dual(const CoEvent& phi) {
    if (phi.size() > 20) throw BudgetError("dual needs all 2^N events; N too large");
    const LocalDomain all(Event::full(phi.stage(), phi.size()));
    const auto table = truth_table_on(phi, all);
    std::vector<Event> terms;
    for (std::uint64_t m = 0; m < table.size(); ++m)
        if (table[m]) terms.push_back(all.to_event(m));
    return CoEvent::from_monomials(phi.stage(), phi.size(), std::move(terms));
}

std::pair<CoEvent, CoEvent> split_at_history(const CoEvent& phi, HistoryIndex h) {
    const Event gamma = Event::single(phi.stage(), phi.size(), h);
    CoEvent first = partial_difference(phi, gamma);
    std::vector<Event> rest;
    for (const auto& m : phi.monomials())
        if (!m.test(h)) rest.push_back(m);
    return {std::move(first), CoEvent::from_monomials(phi.stage(), phi.size(), std::move(rest))};
}

ProlongationStructure check_prolongation_structure(const CoEvent& next, const CoEvent& prev,
                                                   const Stage& stage_t) {
    if (stage_t.t() == 0 || next.stage() != stage_t.t() || prev.stage() + 1 != stage_t.t() ||
        prev.size() != stage_t.previous_size()) {
        throw StageMismatchError("prolongation check needs co-events of consecutive stages");
    }
    std::map<Event, std::vector<Event>> groups;
    for (const auto& m : next.monomials()) groups[restrict_event(m, stage_t)].push_back(m);

    ProlongationStructure out;
    for (const auto& e : prev.monomials()) {
        auto it = groups.find(e);
        if (it == groups.end() || it->second.empty()) {
            out.missing.push_back(e);
            continue;
        }
        out.direct.emplace_back(it->second.front(), e);
        it->second.erase(it->second.begin());
    }
    for (auto& [restricted, members] : groups) {
        std::size_t i = 0;
        for (; i + 1 < members.size(); i += 2) out.cancelling.emplace_back(members[i], members[i + 1]);
        if (i < members.size()) out.leftover.push_back(members[i]);
    }
    out.is_prolongation = out.missing.empty() && out.leftover.empty();
    return out;
}

std::vector<std::uint8_t> truth_table_on(const CoEvent& phi, const LocalDomain& domain) {
    const std::size_t k = domain.size();
    if (k > 26) throw BudgetError("truth table over " + std::to_string(k) + " histories");
    std::vector<std::uint8_t> table(std::size_t{1} << k, 0);
    for (const auto& m : phi.monomials())
        if (m.is_subset_of(domain.domain())) table[domain.to_local(m)] ^= 1;
    // Zeta transform: table[A] = parity of monomials contained in A.
    for (std::size_t bit = 0; bit < k; ++bit) {
        const std::uint64_t b = std::uint64_t{1} << bit;
        for (std::uint64_t a = 0; a < table.size(); ++a)
            if (a & b) table[a] ^= table[a ^ b];
    }
    return table;
}

CoEvent from_truth_table_on(const std::vector<std::uint8_t>& table, const LocalDomain& domain) {
    const std::size_t k = domain.size();
    if (table.size() != (std::size_t{1} << k)) {
        throw std::invalid_argument("truth table size does not match the domain");
    }
    std::vector<std::uint8_t> coeff(table.begin(), table.end());
    // Moebius transform over GF(2) coincides with the zeta transform.
    for (std::size_t bit = 0; bit < k; ++bit) {
        const std::uint64_t b = std::uint64_t{1} << bit;
        for (std::uint64_t a = 0; a < coeff.size(); ++a)
            if (a & b) coeff[a] ^= coeff[a ^ b];
    }
    std::vector<Event> terms;
    for (std::uint64_t m = 0; m < coeff.size(); ++m)
        if (coeff[m] & 1u) terms.push_back(domain.to_event(m));
    const Event& d = domain.domain();
    return CoEvent::from_monomials(d.stage(), d.size(), std::move(terms));
}

std::string render(const CoEvent& phi, const std::vector<std::string>& labels) {
    if (phi.is_zero()) return "0";
    std::string out;
    bool first_term = true;
    for (const auto& m : phi.monomials()) {
        if (!first_term) out += " + ";
        first_term = false;
        if (m.none()) {
            out += "1";
            continue;
        }
        bool first_factor = true;
        m.for_each([&](HistoryIndex h) {
            if (!first_factor) out += "·";
            first_factor = false;
            out += (h < labels.size() ? labels[h] : std::to_string(h)) + "*";
        });
    }
    return out;
}

std::string render(const CoEvent& phi, const Stage& stage) {
    std::vector<std::string> labels;
    labels.reserve(stage.size());
    for (const auto& h : stage.histories()) labels.push_back(h.label);
    return render(phi, labels);
}

} // namespace coevent
