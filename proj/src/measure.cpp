#include "coevent/measure.hpp"

#include "coevent/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

namespace coevent {

DecoherenceMatrix::DecoherenceMatrix(StageIndex stage, Eigen::MatrixXcd entries)
    : stage_(stage), entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        throw ValidationError("decoherence matrix for stage " + std::to_string(stage) +
                              " must be square and non-empty");
    }
    if (static_cast<std::size_t>(entries_.rows()) > Event::kMaxHistories) {
        throw BudgetError("decoherence matrix wider than the event limit");
    }
    for (Eigen::Index i = 0; i < entries_.rows(); ++i)
        for (Eigen::Index j = 0; j < entries_.cols(); ++j)
            if (!std::isfinite(entries_(i, j).real()) || !std::isfinite(entries_(i, j).imag()))
                throw ValidationError("decoherence matrix for stage " + std::to_string(stage) +
                                      " has a non-finite entry");
    frobenius_ = entries_.norm();
}

double DecoherenceMatrix::off_diagonal_norm() const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < entries_.rows(); ++i)
        for (Eigen::Index j = 0; j < entries_.cols(); ++j)
            if (i != j) sum += std::norm(entries_(i, j));
    return std::sqrt(sum);
}

bool DecoherenceMatrix::is_classical(double tolerance) const {
    return off_diagonal_norm() <= tolerance * frobenius_;
}

Event DecoherenceMatrix::null_histories(double tolerance) const {
    Event z(stage_, size());
    for (std::size_t h = 0; h < size(); ++h) {
        const auto i = static_cast<Eigen::Index>(h);
        if (std::abs(entries_(i, i).real()) <= tolerance * frobenius_)
            z.set(static_cast<HistoryIndex>(h));
    }
    return z;
}

namespace {

void check_stage(const Event& e, const DecoherenceMatrix& d) {
    if (e.stage() != d.stage() || e.size() != d.size()) {
        throw StageMismatchError("event of stage " + std::to_string(e.stage()) +
                                 " used with the decoherence matrix of stage " +
                                 std::to_string(d.stage()));
    }
}

Eigen::VectorXcd apply(const DecoherenceMatrix& d, const Event& e) {
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d.size()));
    e.for_each([&](HistoryIndex h) { w += d.entries().col(h); });
    return w;
}

} // namespace

Complex decoherence(const Event& a, const Event& b, const DecoherenceMatrix& d) {
    check_stage(a, d);
    check_stage(b, d);
    Complex sum{0.0, 0.0};
    a.for_each([&](HistoryIndex i) { b.for_each([&](HistoryIndex j) { sum += d(i, j); }); });
    return sum;
}

double mu(const Event& e, const DecoherenceMatrix& d, double null_tolerance) {
    const double value = decoherence(e, e, d).real();
    if (std::abs(value) <= null_tolerance * d.frobenius_norm()) return 0.0;
    return value;
}

bool is_null_event(const Event& e, const DecoherenceMatrix& d, double null_tolerance) {
    check_stage(e, d);
    return apply(d, e).norm() <= null_tolerance * d.frobenius_norm();
}

NullScan scan_null_events(const DecoherenceMatrix& d, const EngineConfig& config) {
    const std::size_t n = d.size();
    const std::size_t limit = std::min(config.max_histories, config.max_null_scan_histories);
    if (n > limit || n > 62) {
        throw BudgetError("null-event scan over 2^" + std::to_string(n) +
                          " events exceeds the cap of 2^" + std::to_string(limit));
    }
    const double threshold = config.null_tolerance * d.frobenius_norm();
    const double border = 1000.0 * threshold;

    NullScan scan;
    std::vector<std::uint64_t> null_masks{0};
    std::vector<std::uint64_t> border_masks;
    Eigen::VectorXcd running = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < total; ++k) {
        const int bit = std::countr_zero(k);
        const std::uint64_t gray = k ^ (k >> 1);
        if ((gray >> bit) & 1u) {
            running += d.entries().col(bit);
        } else {
            running -= d.entries().col(bit);
        }
        const double r = running.norm();
        if (r <= threshold) {
            null_masks.push_back(gray);
        } else if (r <= border) {
            border_masks.push_back(gray);
        }
    }
    std::sort(null_masks.begin(), null_masks.end());
    std::sort(border_masks.begin(), border_masks.end());
    scan.nulls.reserve(null_masks.size());
    for (auto m : null_masks) scan.nulls.push_back(Event::from_mask(d.stage(), n, m));
    for (auto m : border_masks) scan.borderline.push_back(Event::from_mask(d.stage(), n, m));
    return scan;
}

std::vector<Event> enumerate_null_events(const DecoherenceMatrix& d, const EngineConfig& config) {
    return scan_null_events(d, config).nulls;
}

NullSet NullSet::from_classical(Event null_histories) {
    NullSet s;
    s.null_histories_ = null_histories;
    s.reduced_ = {Event(null_histories.stage(), null_histories.size())};
    s.classical_ = true;
    return s;
}

NullSet NullSet::from_scan(Event null_histories, const std::vector<Event>& nulls) {
    NullSet s;
    s.null_histories_ = null_histories;
    for (const auto& p : nulls)
        if (!p.intersects(null_histories)) s.reduced_.push_back(p);
    std::sort(s.reduced_.begin(), s.reduced_.end());
    s.reduced_.erase(std::unique(s.reduced_.begin(), s.reduced_.end()), s.reduced_.end());
    if (s.reduced_.empty() || s.reduced_.front().any()) {
        s.reduced_.insert(s.reduced_.begin(), Event(null_histories.stage(), null_histories.size()));
    }
    return s;
}

bool NullSet::contains(const Event& e) const {
    const Event r = e - null_histories_;
    if (classical_) return r.none();
    return std::binary_search(reduced_.begin(), reduced_.end(), r);
}

std::vector<Event> NullSet::expand(std::size_t limit) const {
    const LocalDomain z(null_histories_);
    const std::size_t per = std::size_t{1} << z.size();
    if (z.size() > 40 || reduced_.size() * per > limit) {
        throw BudgetError("null set has too many members to list explicitly");
    }
    std::vector<Event> out;
    out.reserve(reduced_.size() * per);
    for (const auto& p : reduced_)
        for (std::uint64_t m = 0; m < per; ++m) out.push_back(p | z.to_event(m));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::uint8_t> NullSet::trace_marks(const LocalDomain& domain) const {
    const std::size_t k = domain.size();
    if (k > 26) throw BudgetError("trace table over " + std::to_string(k) + " histories");
    std::vector<std::uint8_t> marks(std::size_t{1} << k, 0);
    const std::uint64_t zmask = domain.to_local(null_histories_);
    std::unordered_set<std::uint64_t> bases;
    for (const auto& p : reduced_) bases.insert(domain.to_local(p));
    for (std::uint64_t b : bases) {
        // every subset of zmask, including zmask itself
        std::uint64_t sub = zmask;
        while (true) {
            marks[b ^ sub] = 1;
            if (sub == 0) break;
            sub = (sub - 1) & zmask;
        }
    }
    return marks;
}

NullSet compute_null_set(const DecoherenceMatrix& d, const EngineConfig& config) {
    const Event z = d.null_histories(config.null_tolerance);
    if (d.is_classical(config.null_tolerance)) return NullSet::from_classical(z);
    return NullSet::from_scan(z, enumerate_null_events(d, config));
}

bool MeasureDiagnostics::ok() const { return first_failure() == nullptr; }

const MeasureCheck* MeasureDiagnostics::first_failure() const {
    for (const auto& c : checks)
        if (!c.passed) return &c;
    return nullptr;
}

double MeasureDiagnostics::max_violation(const std::string& name) const {
    double m = 0.0;
    for (const auto& c : checks)
        if (c.name == name) m = std::max(m, c.max_violation);
    return m;
}

bool MeasureDiagnostics::all_classical() const {
    return std::all_of(classical.begin(), classical.end(), [](bool b) { return b; });
}

MeasureDiagnostics validate_measure(const StageSequence& stages,
                                    const std::vector<DecoherenceMatrix>& matrices,
                                    double tolerance, double null_tolerance) {
    if (matrices.size() != stages.size()) {
        throw ValidationError(std::to_string(matrices.size()) + " decoherence matrices for " +
                              std::to_string(stages.size()) + " stages");
    }
    MeasureDiagnostics diag;
    for (std::size_t t = 0; t < matrices.size(); ++t) {
        const auto& d = matrices[t];
        const auto& stage = stages[t];
        if (d.size() != stage.size() || d.stage() != stage.t()) {
            throw ValidationError("decoherence matrix " + std::to_string(t) + " is " +
                                  std::to_string(d.size()) + "x" + std::to_string(d.size()) +
                                  " but stage " + std::to_string(stage.t()) + " has " +
                                  std::to_string(stage.size()) + " histories");
        }
        const auto st = static_cast<StageIndex>(t);
        const Eigen::MatrixXcd& m = d.entries();

        const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
        diag.checks.push_back({"hermitian", st, herm, herm <= tolerance});

        // Eigenvalues of the Hermitian part; the asymmetric part is reported above.
        const Eigen::MatrixXcd sym = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym, Eigen::EigenvaluesOnly);
        const double min_eig = solver.eigenvalues().minCoeff();
        const double psd_violation = std::max(0.0, -min_eig);
        diag.checks.push_back({"psd", st, psd_violation, min_eig >= -tolerance});

        const double norm_violation = std::abs(m.sum() - Complex(1.0, 0.0));
        diag.checks.push_back({"normalization", st, norm_violation, norm_violation <= tolerance});

        if (t > 0) {
            const auto& prev = matrices[t - 1];
            Eigen::MatrixXcd lift = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(stage.size()),
                                                           static_cast<Eigen::Index>(prev.size()));
            for (const auto& h : stage.histories()) lift(h.index, *h.parent) = 1.0;
            const Eigen::MatrixXcd summed = lift.transpose() * m * lift;
            const double cons = (summed - prev.entries()).cwiseAbs().maxCoeff();
            diag.checks.push_back({"consistency", st, cons, cons <= tolerance});
        }
        diag.classical.push_back(d.is_classical(null_tolerance));
    }
    return diag;
}

} // namespace coevent
