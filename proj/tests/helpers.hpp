#ifndef COEVENT_TEST_HELPERS_HPP
#define COEVENT_TEST_HELPERS_HPP

#include "coevent/coevent.hpp"
#include "coevent/measure.hpp"
#include "coevent/scheme.hpp"
#include "coevent/systems.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

namespace testutil {

using namespace coevent;

inline System hadamard_hopper(StageIndex last, const EngineConfig& config = {}) {
    Eigen::VectorXcd psi(2);
    psi << 1.0, 0.0;
    return build_hopper(hopper_spec(hadamard_unitary(), psi), last, config);
}

inline System dft3_hopper(StageIndex last, const EngineConfig& config = {}) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(3);
    psi(0) = 1.0;
    return build_hopper(hopper_spec(dft_unitary(3), psi), last, config);
}

inline System uniform_walker(StageIndex last, std::size_t cap = 243) {
    EngineConfig config;
    config.max_histories = cap;
    return build_walker(walker_spec(), last, config);
}

inline Event by_labels(const Stage& stage, const std::vector<std::string>& labels) {
    Event e = stage.empty_event();
    for (const auto& l : labels) e.set(*stage.find_label(l));
    return e;
}

inline CoEvent star(const Stage& stage, const std::string& label) {
    return CoEvent::classical(stage.t(), stage.size(), *stage.find_label(label));
}

inline std::vector<CoEvent> sorted(std::vector<CoEvent> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Random co-event over all 2^(2^n) polynomials with n <= 5.
inline CoEvent random_coevent(StageIndex t, std::size_t n, std::mt19937_64& rng) {
    std::vector<Event> monomials;
    const std::uint64_t events = std::uint64_t{1} << n;
    for (std::uint64_t m = 0; m < events; ++m)
        if (rng() & 1u) monomials.push_back(Event::from_mask(t, n, m));
    return CoEvent::from_monomials(t, n, monomials);
}

// Random Hermitian PSD matrix of unit entry sum and rank <= rank, sometimes with null directions.
inline Eigen::MatrixXcd random_psd(std::size_t n, std::size_t rank, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXcd b(N, static_cast<Eigen::Index>(rank));
    for (Eigen::Index i = 0; i < b.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = {g(rng), g(rng)};
    Eigen::MatrixXcd d = b * b.adjoint();
    const std::complex<double> total = d.sum();
    return d / total.real();
}

// Two stages, 2 then 4 histories (parents 0,0,1,1). Stage-1 amplitudes are
// drawn from a small set with two endpoint classes, so exact cancellations
// (null events) are common; stage 0 is the coarse-grained matrix.
inline System random_small_system(std::mt19937_64& rng) {
    static const std::complex<double> pool[] = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {1, 1}, {2, 0}};
    Eigen::MatrixXcd d1;
    for (;;) {
        Eigen::VectorXcd a(4);
        int cls[4];
        for (int i = 0; i < 4; ++i) {
            a(i) = pool[rng() % 6];
            cls[i] = static_cast<int>(rng() % 2);
        }
        d1 = Eigen::MatrixXcd::Zero(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (cls[i] == cls[j]) d1(i, j) = a(i) * std::conj(a(j));
        if (d1.sum().real() > 0.5) break;
    }
    d1 /= d1.sum().real();
    Eigen::MatrixXcd d0 = Eigen::MatrixXcd::Zero(2, 2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) d0(i / 2, j / 2) += d1(i, j);
    SystemSpec spec;
    spec.kind = SystemKind::custom;
    CustomStageSpec s0, s1;
    s0.labels = {"a", "b"};
    s0.decoherence = d0;
    s1.labels = {"a0", "a1", "b0", "b1"};
    s1.parents = {0, 0, 1, 1};
    s1.decoherence = d1;
    spec.stages = {s0, s1};
    return build_custom(spec);
}

} // namespace testutil

#endif
