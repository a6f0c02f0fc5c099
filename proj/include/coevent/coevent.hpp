#ifndef COEVENT_COEVENT_HPP
#define COEVENT_COEVENT_HPP

#include "coevent/event.hpp"
#include "coevent/stage.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace coevent {

/// A co-event (map from events to Z_2) held in its unique polynomial form:
/// a sum of monomials E*, where E*(A) = 1 iff A contains E. The monomial of
/// the empty event is the constant 1; the empty sum is the constant 0.
///
/// Monomials are kept sorted and duplicate-free (pairs cancel mod 2), so two
/// co-events are equal iff their monomial lists are equal.
class CoEvent {
public:
    CoEvent() = default;
    // The zero co-event on a stage of `size` histories.
    CoEvent(StageIndex stage, std::size_t size) : stage_(stage), size_(size) {}

    static CoEvent zero(StageIndex stage, std::size_t size) { return CoEvent(stage, size); }
    static CoEvent one(StageIndex stage, std::size_t size);
    static CoEvent monomial(const Event& e);
    // The classical co-event h*.
    static CoEvent classical(StageIndex stage, std::size_t size, HistoryIndex h);
    // Sum of the given monomials; repeated monomials cancel in pairs.
    static CoEvent from_monomials(StageIndex stage, std::size_t size, std::vector<Event> monomials);

    StageIndex stage() const { return stage_; }
    std::size_t size() const { return size_; }
    const std::vector<Event>& monomials() const { return monomials_; }
    bool is_zero() const { return monomials_.empty(); }
    bool is_one() const { return monomials_.size() == 1 && monomials_.front().none(); }

    // Parity of the monomials contained in `a`.
    bool evaluate(const Event& a) const;
    bool operator()(const Event& a) const { return evaluate(a); }

    CoEvent& operator+=(const CoEvent& other);
    friend CoEvent operator+(CoEvent a, const CoEvent& b) { return a += b; }
    friend CoEvent operator*(const CoEvent& a, const CoEvent& b);

    friend bool operator==(const CoEvent&, const CoEvent&) = default;
    friend std::strong_ordering operator<=>(const CoEvent& a, const CoEvent& b);

private:
    void check_compatible(const CoEvent& other) const;
    void canonicalize();

    StageIndex stage_ = 0;
    std::size_t size_ = 0;
    std::vector<Event> monomials_;
};

enum class CoEventOp { add, mul };

CoEvent coevent_ring(const CoEvent& a, const CoEvent& b, CoEventOp op);

// d(phi)/dX: product of the single-history differences over the members of X.
CoEvent partial_difference(const CoEvent& phi, const Event& x);

// Union of the monomials.
Event support(const CoEvent& phi);

// phi|-(E) = phi(T+(E)); monomials map to their restrictions.
CoEvent restrict_coevent(const CoEvent& phi, const Stage& stage_t);

struct ExpansionTerm {
    bool coefficient = false;
    Event monomial;
};

// Terms E with d(phi)/dE (X) = 1, sorted by E. Every other coefficient is 0.
std::vector<ExpansionTerm> expand_around(const CoEvent& phi, const Event& x);

// Sum over terms of coefficient * E*(A + X).
bool evaluate_expansion(const std::vector<ExpansionTerm>& terms, const Event& x, const Event& a);

// The co-event whose polynomial coefficients are the values of phi:
// dual(phi) = sum over E of phi(E) E*. An involution.
CoEvent dual(const CoEvent& phi);

// phi = h* . first + second, neither depending on h.
std::pair<CoEvent, CoEvent> split_at_history(const CoEvent& phi, HistoryIndex h);

struct ProlongationStructure {
    bool is_prolongation = false;
    std::vector<std::pair<Event, Event>> direct;      // (A_i, E_i) with A_i|- = E_i
    std::vector<std::pair<Event, Event>> cancelling;  // (B_j, C_j) with B_j|- = C_j|-
    std::vector<Event> leftover;                      // unpaired monomials D_k
    std::vector<Event> missing;                       // E_i with no A_i
};

ProlongationStructure check_prolongation_structure(const CoEvent& next, const CoEvent& prev,
                                                   const Stage& stage_t);

// Values of phi on every subset of the domain, indexed by local mask.
std::vector<std::uint8_t> truth_table_on(const CoEvent& phi, const LocalDomain& domain);

// The co-event with phi(E) = table[E . domain] (Moebius transform on the domain).
CoEvent from_truth_table_on(const std::vector<std::uint8_t>& table, const LocalDomain& domain);

// "a*·b* + c*"; "0" and "1" for the constants.
std::string render(const CoEvent& phi, const Stage& stage);
std::string render(const CoEvent& phi, const std::vector<std::string>& labels);

} // namespace coevent

#endif
