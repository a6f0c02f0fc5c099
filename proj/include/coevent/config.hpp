#ifndef COEVENT_CONFIG_HPP
#define COEVENT_CONFIG_HPP

#include <cstddef>
#include <cstdint>

namespace coevent {

struct EngineConfig {
    // Largest history space accepted for any stage.
    std::size_t max_histories = 20;
    // Largest stage for which all 2^N events are scanned for nulls.
    std::size_t max_null_scan_histories = 24;
    // Null threshold, relative to the Frobenius norm of the decoherence matrix.
    double null_tolerance = 1e-9;
    // Tolerance for the Hermitian / PSD / normalization / consistency checks.
    double validation_tolerance = 1e-9;
    // (affirm, deny) pairs examined while building one constraint family.
    std::uint64_t pair_budget = std::uint64_t{1} << 26;
    // Co-events synthesized on a single support in mode `all`.
    std::uint64_t coevent_budget = std::uint64_t{1} << 16;
    // Largest support whose traces are tabulated explicitly.
    std::size_t max_support_size = 20;
};

} // namespace coevent

#endif
