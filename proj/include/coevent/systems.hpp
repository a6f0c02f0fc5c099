#ifndef COEVENT_SYSTEMS_HPP
#define COEVENT_SYSTEMS_HPP

#include "coevent/config.hpp"
#include "coevent/measure.hpp"
#include "coevent/stage.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace coevent {

/// Stages 0..T with one decoherence matrix per stage.
struct System {
    StageSequence stages;
    std::vector<DecoherenceMatrix> matrices;

    std::size_t size() const { return stages.size(); }
    StageIndex last_stage() const { return static_cast<StageIndex>(stages.size() - 1); }
};

enum class SystemKind { hopper, walker, custom };

struct CustomStageSpec {
    std::vector<std::string> labels;
    std::vector<HistoryIndex> parents;  // empty at stage 0
    // Exactly one of the following three.
    std::optional<std::vector<Complex>> amplitudes;
    std::vector<std::string> classes;  // endpoint classes, with amplitudes
    std::optional<Eigen::MatrixXcd> decoherence;
    std::optional<std::vector<double>> probabilities;
};

struct SystemSpec {
    SystemKind kind = SystemKind::walker;
    // hopper
    std::size_t n = 2;
    Eigen::MatrixXcd transition;
    Eigen::VectorXcd psi0;
    // walker
    std::vector<double> p0{1.0 / 3, 1.0 / 3, 1.0 / 3};
    // custom
    std::vector<CustomStageSpec> stages;
    // Optional history cap carried by the file; flags and the environment override it.
    std::optional<std::size_t> max_histories;
};

Eigen::MatrixXcd hadamard_unitary();
Eigen::MatrixXcd dft_unitary(std::size_t n);

SystemSpec parse_system_spec(const std::string& json_text);
SystemSpec load_system_spec(const std::string& path);

SystemSpec hopper_spec(const Eigen::MatrixXcd& transition, const Eigen::VectorXcd& psi0);
SystemSpec walker_spec(std::vector<double> p0 = {1.0 / 3, 1.0 / 3, 1.0 / 3});

// Site path labels such as "0→1→1".
std::string path_label(const std::vector<std::size_t>& sites);

System build_hopper(const SystemSpec& spec, StageIndex last, const EngineConfig& config = {});
System build_walker(const SystemSpec& spec, StageIndex last, const EngineConfig& config = {});
// Builds every listed stage.
System build_custom(const SystemSpec& spec, const EngineConfig& config = {});
// Stages 0..last; custom specs must provide at least that many stages.
System build_system(const SystemSpec& spec, StageIndex last, const EngineConfig& config = {});

// Stages 0..last of an existing system.
System truncate_system(const System& system, StageIndex last);

// Inserts after stage t a copy of it (one extension per history, same
// labels and matrix); later stages shift by one.
System insert_copied_stage(const System& system, StageIndex t, const EngineConfig& config = {});

// Throws ValidationError naming the first failing check.
void require_valid_measure(const System& system, double tolerance);

// Custom spec with explicit decoherence matrices.
std::string dump_custom_spec(const System& system);

} // namespace coevent

#endif
