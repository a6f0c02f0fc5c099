#ifndef COEVENT_MEASURE_HPP
#define COEVENT_MEASURE_HPP

#include "coevent/config.hpp"
#include "coevent/event.hpp"
#include "coevent/stage.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace coevent {

using Complex = std::complex<double>;

/// Hermitian PSD matrix of pairwise interference between the histories of
/// one stage. Entries must be finite; the physical conditions are checked
/// by `validate_measure`, not here.
class DecoherenceMatrix {
public:
    DecoherenceMatrix() = default;
    DecoherenceMatrix(StageIndex stage, Eigen::MatrixXcd entries);

    StageIndex stage() const { return stage_; }
    std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
    const Eigen::MatrixXcd& entries() const { return entries_; }
    Complex operator()(HistoryIndex i, HistoryIndex j) const { return entries_(i, j); }

    double frobenius_norm() const { return frobenius_; }
    double off_diagonal_norm() const;
    // Off-diagonal Frobenius norm within `tolerance` (relative) of zero.
    bool is_classical(double tolerance) const;
    // Histories with d(h,h) <= tolerance * ||d||_F.
    Event null_histories(double tolerance) const;

    // Column h as a vector (d v_h).
    Eigen::VectorXcd column(HistoryIndex h) const { return entries_.col(h); }

private:
    StageIndex stage_ = 0;
    Eigen::MatrixXcd entries_;
    double frobenius_ = 0.0;
};

// D(A,B) = v_A^dagger d v_B.
Complex decoherence(const Event& a, const Event& b, const DecoherenceMatrix& d);

// mu(E) = D(E,E), clamped to 0 within the null tolerance.
double mu(const Event& e, const DecoherenceMatrix& d, double null_tolerance = 1e-9);

// ||d v_E|| <= tolerance * ||d||_F. Equivalent to mu(E) = 0 for PSD d.
bool is_null_event(const Event& e, const DecoherenceMatrix& d, double null_tolerance = 1e-9);

struct NullScan {
    std::vector<Event> nulls;       // sorted by bitmask, includes the empty event
    std::vector<Event> borderline;  // above tolerance but within 1000x of it
};

// Gray-code scan of all 2^N events.
NullScan scan_null_events(const DecoherenceMatrix& d, const EngineConfig& config);
std::vector<Event> enumerate_null_events(const DecoherenceMatrix& d, const EngineConfig& config);

/// The null events of one stage, stored modulo the null histories Z.
///
/// For PSD d, adding or removing null histories never changes nullity, so
/// the nulls are exactly {P + z : P in reduced(), z subset of Z}. A classical
/// (diagonal) measure has reduced() == {0}: its nulls are the subsets of Z,
/// which needs no scan at all.
class NullSet {
public:
    NullSet() = default;
    static NullSet from_classical(Event null_histories);
    // `nulls` is the full scan output; members meeting Z are folded away.
    static NullSet from_scan(Event null_histories, const std::vector<Event>& nulls);

    const Event& null_histories() const { return null_histories_; }
    const std::vector<Event>& reduced() const { return reduced_; }
    bool is_classical() const { return classical_; }
    std::size_t stage_size() const { return null_histories_.size(); }

    bool contains(const Event& e) const;
    // Every null event; throws BudgetError above `limit` events.
    std::vector<Event> expand(std::size_t limit = std::size_t{1} << 22) const;
    // marks[m] = 1 iff some null P has P*S equal to local mask m of `domain`.
    std::vector<std::uint8_t> trace_marks(const LocalDomain& domain) const;

private:
    Event null_histories_;
    std::vector<Event> reduced_;
    bool classical_ = false;
};

// Uses the implicit classical form when the measure is diagonal, otherwise a full scan.
NullSet compute_null_set(const DecoherenceMatrix& d, const EngineConfig& config);

struct MeasureCheck {
    std::string name;  // hermitian | psd | normalization | consistency
    StageIndex t = 0;
    double max_violation = 0.0;
    bool passed = true;
};

struct MeasureDiagnostics {
    std::vector<MeasureCheck> checks;
    std::vector<bool> classical;  // per stage
    std::vector<std::size_t> borderline_events;  // per stage; only filled when scanned

    bool ok() const;
    const MeasureCheck* first_failure() const;
    // Largest violation of the named check over all stages.
    double max_violation(const std::string& name) const;
    bool all_classical() const;
};

MeasureDiagnostics validate_measure(const StageSequence& stages,
                                    const std::vector<DecoherenceMatrix>& matrices,
                                    double tolerance = 1e-9, double null_tolerance = 1e-9);

} // namespace coevent

#endif
