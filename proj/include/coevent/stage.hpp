#ifndef COEVENT_STAGE_HPP
#define COEVENT_STAGE_HPP

#include "coevent/event.hpp"

#include <optional>
#include <string>
#include <vector>

namespace coevent {

struct History {
    StageIndex stage = 0;
    HistoryIndex index = 0;
    std::string label;
    std::optional<HistoryIndex> parent;  // absent at stage 0
};

/// One history space Omega_t together with its restriction map into
/// Omega_{t-1}. Immutable after construction.
class Stage {
public:
    // Stage 0: no parents.
    Stage(std::vector<std::string> labels, std::size_t max_histories);
    // Stage t > 0: parents[i] is the restriction of history i into a stage of
    // `previous_size` histories. The map must be surjective.
    Stage(StageIndex t, std::vector<std::string> labels, std::vector<HistoryIndex> parents,
          std::size_t previous_size, std::size_t max_histories);

    StageIndex t() const { return t_; }
    std::size_t size() const { return histories_.size(); }
    std::size_t previous_size() const { return previous_size_; }
    const std::vector<History>& histories() const { return histories_; }
    const History& history(HistoryIndex h) const { return histories_.at(h); }
    const std::string& label(HistoryIndex h) const { return histories_.at(h).label; }
    std::optional<HistoryIndex> find_label(const std::string& label) const;

    // Children of a previous-stage history, as an event of this stage.
    const Event& children_of(HistoryIndex parent) const { return children_.at(parent); }

    Event empty_event() const { return Event(t_, size()); }
    Event full_event() const { return Event::full(t_, size()); }
    Event single(HistoryIndex h) const { return Event::single(t_, size(), h); }
    Event event_of(const std::vector<HistoryIndex>& members) const {
        return Event::from_indices(t_, size(), members);
    }

private:
    void check_labels() const;

    StageIndex t_ = 0;
    std::size_t previous_size_ = 0;
    std::vector<History> histories_;
    std::vector<Event> children_;
};

/// Consecutive stages 0..T.
class StageSequence {
public:
    StageSequence() = default;
    explicit StageSequence(std::vector<Stage> stages);

    std::size_t size() const { return stages_.size(); }
    bool empty() const { return stages_.empty(); }
    const Stage& operator[](std::size_t t) const { return stages_.at(t); }
    const Stage& back() const { return stages_.back(); }
    const std::vector<Stage>& stages() const { return stages_; }

    void push_back(Stage stage);

private:
    std::vector<Stage> stages_;
};

struct LinkDiagnostics {
    StageIndex t = 0;                            // index of the later stage
    std::vector<std::size_t> extension_counts;   // per previous history
    std::size_t min_extensions = 0;
    std::size_t max_extensions = 0;
};

// Parent of history `h` of `stage_t`.
HistoryIndex restrict_history(const Stage& stage_t, HistoryIndex h);

// Preimage of a stage t-1 event under the restriction map.
Event extend_event(const Event& e, const Stage& stage_t);

// Image of a stage t event under the restriction map.
Event restrict_event(const Event& e, const Stage& stage_t);

enum class RingOp { add, mul, complement };

// `b` is ignored for `complement`.
Event event_algebra(const Event& a, const Event& b, RingOp op);

// Checks that the parent map of `next` is total and onto `prev`.
LinkDiagnostics validate_stage_link(const Stage& prev, const Stage& next);

} // namespace coevent

#endif
