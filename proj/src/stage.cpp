#include "coevent/stage.hpp"

#include "coevent/errors.hpp"

#include <algorithm>
#include <unordered_set>

namespace coevent {

namespace {

void check_cap(std::size_t n, std::size_t max_histories, StageIndex t) {
    if (n == 0) throw ValidationError("stage " + std::to_string(t) + " has no histories");
    if (n > max_histories || n > Event::kMaxHistories) {
        throw BudgetError("stage " + std::to_string(t) + " has " + std::to_string(n) +
                          " histories, above the configured cap of " +
                          std::to_string(std::min(max_histories, Event::kMaxHistories)));
    }
}

} // namespace

Stage::Stage(std::vector<std::string> labels, std::size_t max_histories) {
    check_cap(labels.size(), max_histories, 0);
    histories_.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        histories_.push_back({0, static_cast<HistoryIndex>(i), std::move(labels[i]), std::nullopt});
    }
    check_labels();
}

Stage::Stage(StageIndex t, std::vector<std::string> labels, std::vector<HistoryIndex> parents,
             std::size_t previous_size, std::size_t max_histories)
    : t_(t), previous_size_(previous_size) {
    if (t == 0) throw ValidationError("stage 0 cannot have a parent map");
    check_cap(labels.size(), max_histories, t);
    if (parents.size() != labels.size()) {
        throw InvalidLinkError("stage " + std::to_string(t) + ": " + std::to_string(labels.size()) +
                               " histories but " + std::to_string(parents.size()) + " parents");
    }
    children_.assign(previous_size, Event(t, labels.size()));
    histories_.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (parents[i] >= previous_size) {
            throw InvalidLinkError("stage " + std::to_string(t) + ": history " + std::to_string(i) +
                                   " has parent " + std::to_string(parents[i]) +
                                   " outside the previous stage of size " +
                                   std::to_string(previous_size));
        }
        children_[parents[i]].set(static_cast<HistoryIndex>(i));
        histories_.push_back({t, static_cast<HistoryIndex>(i), std::move(labels[i]), parents[i]});
    }
    std::vector<HistoryIndex> orphans;
    for (std::size_t p = 0; p < previous_size; ++p)
        if (children_[p].none()) orphans.push_back(static_cast<HistoryIndex>(p));
    if (!orphans.empty()) {
        std::string msg = "stage " + std::to_string(t) + ": restriction map is not surjective; " +
                          "previous histories without extension:";
        for (auto o : orphans) msg += " " + std::to_string(o);
        throw InvalidLinkError(msg);
    }
    check_labels();
}

void Stage::check_labels() const {
    std::unordered_set<std::string> seen;
    for (const auto& h : histories_) {
        if (!seen.insert(h.label).second) {
            throw ValidationError("stage " + std::to_string(t_) + ": duplicate history label '" +
                                  h.label + "'");
        }
    }
}

std::optional<HistoryIndex> Stage::find_label(const std::string& label) const {
    for (const auto& h : histories_)
        if (h.label == label) return h.index;
    return std::nullopt;
}

StageSequence::StageSequence(std::vector<Stage> stages) {
    for (auto& s : stages) push_back(std::move(s));
}

void StageSequence::push_back(Stage stage) {
    if (stage.t() != stages_.size()) {
        throw InvalidLinkError("stage " + std::to_string(stage.t()) + " appended at position " +
                               std::to_string(stages_.size()));
    }
    if (!stages_.empty()) validate_stage_link(stages_.back(), stage);
    stages_.push_back(std::move(stage));
}

HistoryIndex restrict_history(const Stage& stage_t, HistoryIndex h) {
    if (stage_t.t() == 0) throw NoPredecessorError("histories at stage 0 have no restriction");
    if (h >= stage_t.size()) {
        throw std::out_of_range("history " + std::to_string(h) + " not in stage " +
                                std::to_string(stage_t.t()));
    }
    return *stage_t.history(h).parent;
}

Event extend_event(const Event& e, const Stage& stage_t) {
    if (stage_t.t() == 0) throw NoPredecessorError("stage 0 is not the extension of any stage");
    if (e.stage() + 1 != stage_t.t() || e.size() != stage_t.previous_size()) {
        throw StageMismatchError("cannot extend an event of stage " + std::to_string(e.stage()) +
                                 " into stage " + std::to_string(stage_t.t()));
    }
    Event out = stage_t.empty_event();
    e.for_each([&](HistoryIndex p) { out |= stage_t.children_of(p); });
    return out;
}

Event restrict_event(const Event& e, const Stage& stage_t) {
    if (stage_t.t() == 0) throw NoPredecessorError("events at stage 0 have no restriction");
    if (e.stage() != stage_t.t() || e.size() != stage_t.size()) {
        throw StageMismatchError("event of stage " + std::to_string(e.stage()) +
                                 " restricted through stage " + std::to_string(stage_t.t()));
    }
    Event out(stage_t.t() - 1, stage_t.previous_size());
    e.for_each([&](HistoryIndex h) { out.set(*stage_t.history(h).parent); });
    return out;
}

Event event_algebra(const Event& a, const Event& b, RingOp op) {
    switch (op) {
    case RingOp::add: return a + b;
    case RingOp::mul: return a * b;
    case RingOp::complement: return a.complement();
    }
    return a;
}

LinkDiagnostics validate_stage_link(const Stage& prev, const Stage& next) {
    if (next.t() != prev.t() + 1) {
        throw InvalidLinkError("stages " + std::to_string(prev.t()) + " and " +
                               std::to_string(next.t()) + " are not consecutive");
    }
    if (next.previous_size() > prev.size()) {
        throw InvalidLinkError("stage " + std::to_string(next.t()) + " refers to " +
                               std::to_string(next.previous_size()) +
                               " previous histories, stage " + std::to_string(prev.t()) + " has " +
                               std::to_string(prev.size()));
    }
    LinkDiagnostics diag;
    diag.t = next.t();
    diag.extension_counts.resize(prev.size());
    std::vector<HistoryIndex> orphans;
    for (std::size_t p = 0; p < prev.size(); ++p) {
        diag.extension_counts[p] =
            p < next.previous_size() ? next.children_of(static_cast<HistoryIndex>(p)).count() : 0;
        if (diag.extension_counts[p] == 0) orphans.push_back(static_cast<HistoryIndex>(p));
    }
    if (!orphans.empty()) {
        std::string msg = "restriction into stage " + std::to_string(prev.t()) +
                          " misses histories:";
        for (auto o : orphans) msg += " " + prev.label(o);
        throw InvalidLinkError(msg);
    }
    auto [lo, hi] = std::minmax_element(diag.extension_counts.begin(), diag.extension_counts.end());
    diag.min_extensions = *lo;
    diag.max_extensions = *hi;
    return diag;
}

} // namespace coevent
