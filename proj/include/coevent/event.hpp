#ifndef COEVENT_EVENT_HPP
#define COEVENT_EVENT_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace coevent {

using StageIndex = std::uint32_t;
using HistoryIndex = std::uint32_t;

/// A set of histories belonging to exactly one stage.
///
/// Stored as a fixed-width bitmask (bit i set iff history i is a member).
/// The Boolean ring structure is exposed through `+` (symmetric difference)
/// and `*` (intersection); the unit of the ring is `Event::full(stage, n)`.
/// Events are ordered by stage, then by bitmask value.
class Event {
public:
    static constexpr std::size_t kWords = 4;
    static constexpr std::size_t kMaxHistories = kWords * 64;

    Event() = default;
    Event(StageIndex stage, std::size_t size);

    static Event empty(StageIndex stage, std::size_t size) { return Event(stage, size); }
    static Event full(StageIndex stage, std::size_t size);
    static Event single(StageIndex stage, std::size_t size, HistoryIndex h);
    static Event from_indices(StageIndex stage, std::size_t size,
                              const std::vector<HistoryIndex>& members);
    // Low 64 histories from `mask`.
    static Event from_mask(StageIndex stage, std::size_t size, std::uint64_t mask);

    StageIndex stage() const { return stage_; }
    std::size_t size() const { return size_; }

    bool test(HistoryIndex h) const { return (words_[h >> 6] >> (h & 63)) & 1u; }
    void set(HistoryIndex h);
    void reset(HistoryIndex h);
    void flip(HistoryIndex h);

    std::size_t count() const;
    bool none() const;
    bool any() const { return !none(); }
    bool is_subset_of(const Event& other) const;
    bool intersects(const Event& other) const;

    std::vector<HistoryIndex> members() const;
    // Lowest-index member; undefined when empty.
    HistoryIndex first() const;
    // Low 64 bits of the mask.
    std::uint64_t low_word() const { return words_[0]; }

    Event complement() const;

    Event& operator+=(const Event& other);
    Event& operator*=(const Event& other);
    Event& operator|=(const Event& other);
    // Set difference (this \ other).
    Event& operator-=(const Event& other);

    friend Event operator+(Event a, const Event& b) { return a += b; }
    friend Event operator*(Event a, const Event& b) { return a *= b; }
    friend Event operator|(Event a, const Event& b) { return a |= b; }
    friend Event operator-(Event a, const Event& b) { return a -= b; }

    friend bool operator==(const Event& a, const Event& b) = default;
    friend std::strong_ordering operator<=>(const Event& a, const Event& b);

    std::size_t hash() const;
    // "{0,3,5}" style rendering by index.
    std::string index_string() const;

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < kWords; ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                const int b = __builtin_ctzll(bits);
                f(static_cast<HistoryIndex>(w * 64 + b));
                bits &= bits - 1;
            }
        }
    }

private:
    void check_compatible(const Event& other) const;

    std::array<std::uint64_t, kWords> words_{};
    StageIndex stage_ = 0;
    std::uint32_t size_ = 0;
};

/// Maps between an event's members and a dense local bit index, so that
/// the subsets of a small event can be walked as integers 0..2^k-1.
class LocalDomain {
public:
    LocalDomain() = default;
    explicit LocalDomain(const Event& domain);

    std::size_t size() const { return members_.size(); }
    const Event& domain() const { return domain_; }
    const std::vector<HistoryIndex>& members() const { return members_; }

    Event to_event(std::uint64_t local_mask) const;
    // Bits of `e` outside the domain are ignored.
    std::uint64_t to_local(const Event& e) const;

private:
    Event domain_;
    std::vector<HistoryIndex> members_;
};

} // namespace coevent

template <>
struct std::hash<coevent::Event> {
    std::size_t operator()(const coevent::Event& e) const noexcept { return e.hash(); }
};

#endif
