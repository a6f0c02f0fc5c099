#include "coevent/event.hpp"

#include "coevent/errors.hpp"

#include <bit>
#include <sstream>

namespace coevent {

Event::Event(StageIndex stage, std::size_t size)
    : stage_(stage), size_(static_cast<std::uint32_t>(size)) {
    if (size > kMaxHistories) {
        throw BudgetError("event width " + std::to_string(size) + " exceeds the hard limit of " +
                          std::to_string(kMaxHistories) + " histories");
    }
}

Event Event::full(StageIndex stage, std::size_t size) {
    Event e(stage, size);
    for (std::size_t w = 0; w < kWords; ++w) {
        const std::size_t lo = w * 64;
        if (size >= lo + 64) {
            e.words_[w] = ~std::uint64_t{0};
        } else if (size > lo) {
            e.words_[w] = (std::uint64_t{1} << (size - lo)) - 1;
        }
    }
    return e;
}

Event Event::single(StageIndex stage, std::size_t size, HistoryIndex h) {
    Event e(stage, size);
    e.set(h);
    return e;
}

Event Event::from_indices(StageIndex stage, std::size_t size,
                          const std::vector<HistoryIndex>& members) {
    Event e(stage, size);
    for (HistoryIndex h : members) e.set(h);
    return e;
}

Event Event::from_mask(StageIndex stage, std::size_t size, std::uint64_t mask) {
    Event e(stage, size);
    if (size < 64) mask &= (std::uint64_t{1} << size) - 1;
    e.words_[0] = mask;
    return e;
}

void Event::set(HistoryIndex h) {
    if (h >= size_) {
        throw std::out_of_range("history index " + std::to_string(h) + " outside stage of size " +
                                std::to_string(size_));
    }
    words_[h >> 6] |= std::uint64_t{1} << (h & 63);
}

void Event::reset(HistoryIndex h) {
    if (h >= size_) return;
    words_[h >> 6] &= ~(std::uint64_t{1} << (h & 63));
}

void Event::flip(HistoryIndex h) {
    if (h >= size_) {
        throw std::out_of_range("history index " + std::to_string(h) + " outside stage of size " +
                                std::to_string(size_));
    }
    words_[h >> 6] ^= std::uint64_t{1} << (h & 63);
}

std::size_t Event::count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

bool Event::none() const {
    for (auto w : words_)
        if (w) return false;
    return true;
}

bool Event::is_subset_of(const Event& other) const {
    for (std::size_t w = 0; w < kWords; ++w)
        if (words_[w] & ~other.words_[w]) return false;
    return true;
}

bool Event::intersects(const Event& other) const {
    for (std::size_t w = 0; w < kWords; ++w)
        if (words_[w] & other.words_[w]) return true;
    return false;
}

std::vector<HistoryIndex> Event::members() const {
    std::vector<HistoryIndex> out;
    out.reserve(count());
    for_each([&](HistoryIndex h) { out.push_back(h); });
    return out;
}

HistoryIndex Event::first() const {
    for (std::size_t w = 0; w < kWords; ++w)
        if (words_[w]) return static_cast<HistoryIndex>(w * 64 + std::countr_zero(words_[w]));
    return static_cast<HistoryIndex>(size_);
}

Event Event::complement() const {
    Event e = full(stage_, size_);
    for (std::size_t w = 0; w < kWords; ++w) e.words_[w] &= ~words_[w];
    return e;
}

void Event::check_compatible(const Event& other) const {
    if (stage_ != other.stage_ || size_ != other.size_) {
        throw StageMismatchError("events from stage " + std::to_string(stage_) + " (N=" +
                                 std::to_string(size_) + ") and stage " +
                                 std::to_string(other.stage_) + " (N=" +
                                 std::to_string(other.size_) + ") cannot be combined");
    }
}

Event& Event::operator+=(const Event& other) {
    check_compatible(other);
    for (std::size_t w = 0; w < kWords; ++w) words_[w] ^= other.words_[w];
    return *this;
}

Event& Event::operator*=(const Event& other) {
    check_compatible(other);
    for (std::size_t w = 0; w < kWords; ++w) words_[w] &= other.words_[w];
    return *this;
}

Event& Event::operator|=(const Event& other) {
    check_compatible(other);
    for (std::size_t w = 0; w < kWords; ++w) words_[w] |= other.words_[w];
    return *this;
}

Event& Event::operator-=(const Event& other) {
    check_compatible(other);
    for (std::size_t w = 0; w < kWords; ++w) words_[w] &= ~other.words_[w];
    return *this;
}

std::strong_ordering operator<=>(const Event& a, const Event& b) {
    if (auto c = a.stage_ <=> b.stage_; c != 0) return c;
    if (auto c = a.size_ <=> b.size_; c != 0) return c;
    for (std::size_t w = Event::kWords; w-- > 0;) {
        if (auto c = a.words_[w] <=> b.words_[w]; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

std::size_t Event::hash() const {
    std::size_t h = std::hash<std::uint64_t>{}(stage_) * 1000003u ^ size_;
    for (auto w : words_) h = (h ^ std::hash<std::uint64_t>{}(w)) * 0x9e3779b97f4a7c15ull;
    return h;
}

std::string Event::index_string() const {
    std::ostringstream os;
    os << '{';
    bool first_member = true;
    for_each([&](HistoryIndex h) {
        if (!first_member) os << ',';
        os << h;
        first_member = false;
    });
    os << '}';
    return os.str();
}

LocalDomain::LocalDomain(const Event& domain) : domain_(domain), members_(domain.members()) {
    if (members_.size() > 62) {
        throw BudgetError("local domain of " + std::to_string(members_.size()) +
                          " histories cannot be enumerated");
    }
}

Event LocalDomain::to_event(std::uint64_t local_mask) const {
    Event e(domain_.stage(), domain_.size());
    while (local_mask) {
        const int b = std::countr_zero(local_mask);
        e.set(members_[static_cast<std::size_t>(b)]);
        local_mask &= local_mask - 1;
    }
    return e;
}

std::uint64_t LocalDomain::to_local(const Event& e) const {
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < members_.size(); ++i)
        if (e.test(members_[i])) out |= std::uint64_t{1} << i;
    return out;
}

} // namespace coevent
