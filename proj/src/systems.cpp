#include "coevent/systems.hpp"

#include "coevent/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace coevent {

using nlohmann::json;

namespace {

constexpr double kUnitarityTolerance = 1e-9;

Complex parse_complex(const json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ValidationError("expected a complex number as [re, im], got " + v.dump());
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

Eigen::MatrixXcd parse_matrix(const json& v, const std::string& what) {
    if (!v.is_array() || v.empty()) throw ValidationError(what + " must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    const auto cols = static_cast<Eigen::Index>(v[0].size());
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ValidationError(what + " has ragged rows");
        }
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = parse_complex(row[static_cast<std::size_t>(j)]);
    }
    return m;
}

std::size_t checked_pow(std::size_t base, std::size_t exp, std::size_t cap) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (r > cap / base) return cap + 1;
        r *= base;
    }
    return r;
}

void check_stage_count(std::size_t base, StageIndex last, const EngineConfig& config,
                       const char* what) {
    const std::size_t cap = std::min(config.max_histories, Event::kMaxHistories);
    const std::size_t n = checked_pow(base, last + 1, cap);
    if (n > cap) {
        throw BudgetError(std::string(what) + " stage " + std::to_string(last) + " needs " +
                          std::to_string(base) + "^" + std::to_string(last + 1) +
                          " histories, above the configured cap of " + std::to_string(cap));
    }
}

// Digits of `index` in base n, most significant first, `len` digits.
std::vector<std::size_t> digits(std::size_t index, std::size_t n, std::size_t len) {
    std::vector<std::size_t> out(len);
    for (std::size_t i = len; i-- > 0;) {
        out[i] = index % n;
        index /= n;
    }
    return out;
}

Stage path_stage(StageIndex t, std::size_t n, const EngineConfig& config) {
    const std::size_t count = checked_pow(n, t + 1, SIZE_MAX / 2);
    std::vector<std::string> labels;
    labels.reserve(count);
    for (std::size_t i = 0; i < count; ++i) labels.push_back(path_label(digits(i, n, t + 1)));
    if (t == 0) return Stage(std::move(labels), config.max_histories);
    std::vector<HistoryIndex> parents(count);
    for (std::size_t i = 0; i < count; ++i) parents[i] = static_cast<HistoryIndex>(i / n);
    return Stage(t, std::move(labels), std::move(parents), count / n, config.max_histories);
}

Eigen::MatrixXcd amplitude_matrix(const std::vector<Complex>& amps, const std::vector<std::string>& classes) {
    const auto n = static_cast<Eigen::Index>(amps.size());
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (classes[static_cast<std::size_t>(i)] == classes[static_cast<std::size_t>(j)])
                d(i, j) = amps[static_cast<std::size_t>(i)] * std::conj(amps[static_cast<std::size_t>(j)]);
    return d;
}

std::string class_name(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

} // namespace

Eigen::MatrixXcd hadamard_unitary() {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd u(2, 2);
    u << r, r, r, -r;
    return u;
}

Eigen::MatrixXcd dft_unitary(std::size_t n) {
    if (n == 0) throw ValidationError("DFT preset needs n >= 1");
    Eigen::MatrixXcd u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n);
            u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = std::polar(scale, angle);
        }
    return u;
}

std::string path_label(const std::vector<std::size_t>& sites) {
    std::string out;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (i) out += "→";
        out += std::to_string(sites[i]);
    }
    return out;
}

SystemSpec hopper_spec(const Eigen::MatrixXcd& transition, const Eigen::VectorXcd& psi0) {
    SystemSpec spec;
    spec.kind = SystemKind::hopper;
    spec.n = static_cast<std::size_t>(transition.rows());
    spec.transition = transition;
    spec.psi0 = psi0;
    return spec;
}

SystemSpec walker_spec(std::vector<double> p0) {
    SystemSpec spec;
    spec.kind = SystemKind::walker;
    spec.p0 = std::move(p0);
    return spec;
}

SystemSpec parse_system_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("system spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind")) throw ValidationError("system spec needs a \"kind\" field");
    const std::string kind = j["kind"].get<std::string>();
    SystemSpec spec;
    try {
        if (j.contains("max_histories")) spec.max_histories = j["max_histories"].get<std::size_t>();
        if (kind == "hopper") {
            spec.kind = SystemKind::hopper;
            const json& u = j.at("U");
            if (u.is_string()) {
                const std::string preset = u.get<std::string>();
                spec.n = j.value("n", std::size_t{2});
                if (preset == "hadamard") {
                    if (spec.n != 2) throw ValidationError("the hadamard preset is 2x2");
                    spec.transition = hadamard_unitary();
                } else if (preset == "dft") {
                    spec.transition = dft_unitary(spec.n);
                } else {
                    throw ValidationError("unknown transition preset '" + preset + "'");
                }
            } else {
                spec.transition = parse_matrix(u, "U");
                spec.n = static_cast<std::size_t>(spec.transition.rows());
                if (j.contains("n") && j["n"].get<std::size_t>() != spec.n) {
                    throw ValidationError("n does not match the size of U");
                }
            }
            spec.psi0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(spec.n));
            if (j.contains("psi0")) {
                const json& p = j["psi0"];
                if (!p.is_array() || p.size() != spec.n) throw ValidationError("psi0 must have n entries");
                for (std::size_t i = 0; i < spec.n; ++i) spec.psi0(static_cast<Eigen::Index>(i)) = parse_complex(p[i]);
            } else {
                spec.psi0(0) = 1.0;
            }
        } else if (kind == "walker") {
            spec.kind = SystemKind::walker;
            if (j.contains("p0")) spec.p0 = j["p0"].get<std::vector<double>>();
        } else if (kind == "custom") {
            spec.kind = SystemKind::custom;
            for (const auto& s : j.at("stages")) {
                CustomStageSpec cs;
                cs.labels = s.at("labels").get<std::vector<std::string>>();
                if (s.contains("parents")) cs.parents = s["parents"].get<std::vector<HistoryIndex>>();
                int sources = 0;
                if (s.contains("amplitudes")) {
                    ++sources;
                    std::vector<Complex> amps;
                    for (const auto& a : s["amplitudes"]) amps.push_back(parse_complex(a));
                    cs.amplitudes = std::move(amps);
                    if (!s.contains("classes")) throw ValidationError("amplitudes need endpoint \"classes\"");
                    for (const auto& c : s["classes"]) cs.classes.push_back(class_name(c));
                }
                if (s.contains("decoherence")) {
                    ++sources;
                    cs.decoherence = parse_matrix(s["decoherence"], "decoherence");
                }
                if (s.contains("probabilities")) {
                    ++sources;
                    cs.probabilities = s["probabilities"].get<std::vector<double>>();
                }
                if (sources != 1) {
                    throw ValidationError("each custom stage needs exactly one of amplitudes, "
                                          "decoherence, probabilities");
                }
                spec.stages.push_back(std::move(cs));
            }
            if (spec.stages.empty()) throw ValidationError("custom system has no stages");
        } else {
            throw ValidationError("unknown system kind '" + kind + "'");
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed system spec: ") + e.what());
    }
    return spec;
}

SystemSpec load_system_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open system spec '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_system_spec(buf.str());
}

void require_valid_measure(const System& system, double tolerance) {
    const auto diag = validate_measure(system.stages, system.matrices, tolerance, tolerance);
    if (const auto* f = diag.first_failure()) {
        throw ValidationError(f->name + " check failed at stage " + std::to_string(f->t) +
                              " (max violation " + std::to_string(f->max_violation) + ")");
    }
}

System build_hopper(const SystemSpec& spec, StageIndex last, const EngineConfig& config) {
    const std::size_t n = spec.n;
    const Eigen::MatrixXcd& u = spec.transition;
    if (n == 0 || u.rows() != static_cast<Eigen::Index>(n) || u.cols() != u.rows()) {
        throw ValidationError("hopper transition matrix must be n x n");
    }
    const double unitarity =
        (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    if (unitarity > kUnitarityTolerance) {
        throw ValidationError("hopper transition matrix is not unitary (deviation " +
                              std::to_string(unitarity) + ")");
    }
    if (spec.psi0.size() != u.rows()) throw ValidationError("psi0 must have n entries");
    if (std::abs(spec.psi0.squaredNorm() - 1.0) > kUnitarityTolerance) {
        throw ValidationError("psi0 is not normalized");
    }
    check_stage_count(n, last, config, "hopper");

    System sys;
    std::vector<Complex> amps(spec.psi0.data(), spec.psi0.data() + n);
    for (StageIndex t = 0; t <= last; ++t) {
        if (t > 0) {
            std::vector<Complex> next(amps.size() * n);
            for (std::size_t p = 0; p < amps.size(); ++p)
                for (std::size_t s = 0; s < n; ++s)
                    next[p * n + s] = amps[p] * u(static_cast<Eigen::Index>(p % n), static_cast<Eigen::Index>(s));
            amps = std::move(next);
        }
        std::vector<std::string> ends(amps.size());
        for (std::size_t i = 0; i < amps.size(); ++i) ends[i] = std::to_string(i % n);
        sys.stages.push_back(path_stage(t, n, config));
        sys.matrices.emplace_back(t, amplitude_matrix(amps, ends));
    }
    require_valid_measure(sys, config.validation_tolerance);
    return sys;
}

System build_walker(const SystemSpec& spec, StageIndex last, const EngineConfig& config) {
    if (spec.p0.size() != 3) throw ValidationError("walker p0 needs 3 entries");
    double total = 0.0;
    for (double p : spec.p0) {
        if (!(p >= 0.0)) throw ValidationError("walker p0 entries must be non-negative");
        total += p;
    }
    if (std::abs(total - 1.0) > kUnitarityTolerance) throw ValidationError("walker p0 must sum to 1");
    check_stage_count(3, last, config, "walker");

    // Moves with probability 1/2: rebound at the walls, step inward or outward.
    auto allowed = [](std::size_t from, std::size_t to) {
        if (from == 1) return to != 1;
        return to != (from == 0 ? 2u : 0u);
    };
    System sys;
    std::vector<double> prob(spec.p0.begin(), spec.p0.end());
    for (StageIndex t = 0; t <= last; ++t) {
        if (t > 0) {
            std::vector<double> next(prob.size() * 3, 0.0);
            for (std::size_t p = 0; p < prob.size(); ++p)
                for (std::size_t s = 0; s < 3; ++s)
                    if (allowed(p % 3, s)) next[p * 3 + s] = prob[p] * 0.5;
            prob = std::move(next);
        }
        const auto n = static_cast<Eigen::Index>(prob.size());
        Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) d(i, i) = prob[static_cast<std::size_t>(i)];
        sys.stages.push_back(path_stage(t, 3, config));
        sys.matrices.emplace_back(t, std::move(d));
    }
    require_valid_measure(sys, config.validation_tolerance);
    return sys;
}

System build_custom(const SystemSpec& spec, const EngineConfig& config) {
    System sys;
    for (std::size_t t = 0; t < spec.stages.size(); ++t) {
        const auto& cs = spec.stages[t];
        const auto st = static_cast<StageIndex>(t);
        if (t == 0) {
            if (!cs.parents.empty()) throw ValidationError("stage 0 cannot have parents");
            sys.stages.push_back(Stage(cs.labels, config.max_histories));
        } else {
            sys.stages.push_back(Stage(st, cs.labels, cs.parents, sys.stages.back().size(), config.max_histories));
        }
        const std::size_t n = cs.labels.size();
        Eigen::MatrixXcd d;
        if (cs.amplitudes) {
            if (cs.amplitudes->size() != n || cs.classes.size() != n) {
                throw ValidationError("stage " + std::to_string(t) + ": amplitudes and classes need " +
                                      std::to_string(n) + " entries");
            }
            d = amplitude_matrix(*cs.amplitudes, cs.classes);
        } else if (cs.decoherence) {
            d = *cs.decoherence;
            if (static_cast<std::size_t>(d.rows()) != n || static_cast<std::size_t>(d.cols()) != n) {
                throw ValidationError("stage " + std::to_string(t) + ": decoherence matrix must be " +
                                      std::to_string(n) + "x" + std::to_string(n));
            }
        } else if (cs.probabilities) {
            if (cs.probabilities->size() != n) {
                throw ValidationError("stage " + std::to_string(t) + ": probabilities need " +
                                      std::to_string(n) + " entries");
            }
            d = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i)
                d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = (*cs.probabilities)[i];
        } else {
            throw ValidationError("stage " + std::to_string(t) + " has no measure");
        }
        sys.matrices.emplace_back(st, std::move(d));
    }
    require_valid_measure(sys, config.validation_tolerance);
    return sys;
}

System truncate_system(const System& system, StageIndex last) {
    if (last >= system.size()) {
        throw ValidationError("system has " + std::to_string(system.size()) + " stages, stage " +
                              std::to_string(last) + " requested");
    }
    System out;
    for (StageIndex t = 0; t <= last; ++t) {
        out.stages.push_back(system.stages[t]);
        out.matrices.push_back(system.matrices[t]);
    }
    return out;
}

System build_system(const SystemSpec& spec, StageIndex last, const EngineConfig& config) {
    switch (spec.kind) {
    case SystemKind::hopper: return build_hopper(spec, last, config);
    case SystemKind::walker: return build_walker(spec, last, config);
    case SystemKind::custom: return truncate_system(build_custom(spec, config), last);
    }
    throw ValidationError("unknown system kind");
}

namespace {

Stage relabel_stage(const Stage& s, StageIndex t, std::size_t previous_size, const EngineConfig& config,
                    bool identity_parents) {
    std::vector<std::string> labels;
    std::vector<HistoryIndex> parents;
    for (const auto& h : s.histories()) {
        labels.push_back(h.label);
        parents.push_back(identity_parents ? h.index : *h.parent);
    }
    if (t == 0) return Stage(std::move(labels), config.max_histories);
    return Stage(t, std::move(labels), std::move(parents), previous_size, config.max_histories);
}

} // namespace

System insert_copied_stage(const System& system, StageIndex t, const EngineConfig& config) {
    if (t >= system.size()) throw ValidationError("cannot copy a stage past the end of the system");
    System out;
    for (StageIndex k = 0; k < system.size(); ++k) {
        const Stage& s = system.stages[k];
        const StageIndex shifted = k <= t ? k : k + 1;
        const std::size_t prev = k == 0 ? 0 : system.stages[k - 1].size();
        out.stages.push_back(k <= t ? s : relabel_stage(s, shifted, prev, config, false));
        out.matrices.emplace_back(shifted, system.matrices[k].entries());
        if (k == t) {
            out.stages.push_back(relabel_stage(s, t + 1, s.size(), config, true));
            out.matrices.emplace_back(t + 1, system.matrices[k].entries());
        }
    }
    require_valid_measure(out, config.validation_tolerance);
    return out;
}

std::string dump_custom_spec(const System& system) {
    json j;
    j["kind"] = "custom";
    j["stages"] = json::array();
    for (std::size_t t = 0; t < system.size(); ++t) {
        const Stage& s = system.stages[t];
        json st;
        json labels = json::array(), parents = json::array();
        for (const auto& h : s.histories()) {
            labels.push_back(h.label);
            if (h.parent) parents.push_back(*h.parent);
        }
        st["labels"] = labels;
        if (t > 0) st["parents"] = parents;
        json rows = json::array();
        const auto& m = system.matrices[t].entries();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
            rows.push_back(row);
        }
        st["decoherence"] = rows;
        j["stages"].push_back(st);
    }
    return j.dump();
}

} // namespace coevent
