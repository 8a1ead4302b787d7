// Experiment drivers behind the command-line tool: a full simulate run
// (model -> MI curve -> redundancy -> coherence), parameter sweeps, and the
// repetition-code experiment, plus the CSV/JSON artifact writers.
//
// Output bytes are pinned: CSV floats use 9 significant digits and a bare
// '\n' terminator, JSON uses sorted keys, and files are written to a
// temporary path and renamed so failures never leave partial artifacts.

#pragma once

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "qdarwin/dynamics.hpp"
#include "qdarwin/ecc.hpp"
#include "qdarwin/information.hpp"
#include "qdarwin/version.hpp"

namespace qdarwin {

enum class OutputFormat { csv, json };

struct ExperimentSpec {
    ModelConfig model;
    double delta = 0.1;
    int policy_threshold = 1000;
    int mc_samples = 200;
    int threads = 0;  // 0 = hardware concurrency
    std::string output_path;
    OutputFormat format = OutputFormat::csv;

    void validate() const {
        model.validate();
        if (!(delta > 0.0 && delta < 1.0)) {
            throw std::invalid_argument("delta must lie in (0, 1)");
        }
        if (policy_threshold < 1) {
            throw std::invalid_argument("policy_threshold must be >= 1");
        }
        if (mc_samples < 1) throw std::invalid_argument("mc_samples must be >= 1");
        if (threads < 0) throw std::invalid_argument("threads must be >= 0");
        // Dense pure states: 1 + N qubits, capped at 22 total.
        if (model.n_env > 21) {
            throw std::invalid_argument("n_env must be <= 21 for dense simulation");
        }
    }

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

struct RunRecord {
    ExperimentSpec spec;
    MICurve curve;
    RedundancyResult redundancy;
    double pointer_coherence_before = 0.0;
    double pointer_coherence_after = 0.0;
    bool scattering_noop = false;
    std::string tool_version;
    std::uint64_t seed = 0;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

inline RunRecord run_experiment(const ExperimentSpec& spec) {
    spec.validate();

    const std::array<int, 1> system_only{0};
    const GlobalState initial{detail::initial_state(spec.model), spec.model, false};
    const double coherence_before =
        pointer_coherence(reduced_from_pure(initial.state, system_only));

    const GlobalState final_state = run_model(spec.model);
    const double coherence_after =
        pointer_coherence(reduced_from_pure(final_state.state, system_only));

    const SamplingPolicy policy{spec.policy_threshold, spec.mc_samples};
    MICurve curve = mi_curve(final_state, policy, spec.model.seed, spec.threads);
    RedundancyResult red = redundancy(curve, spec.delta);

    return RunRecord{spec,
                     std::move(curve),
                     red,
                     coherence_before,
                     coherence_after,
                     final_state.scattering_noop,
                     version_string,
                     spec.model.seed};
}

// --- formatting -------------------------------------------------------

namespace detail {

// 9 significant digits, fixed across platforms; negative zero collapses to 0.
inline std::string format_float9(double v) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace detail

inline std::string curve_to_csv(const MICurve& curve) {
    std::string out = "m,f,mean_mi_bits,std_mi_bits,n_fragments,exhaustive\n";
    for (const auto& row : curve.per_size) {
        out += std::to_string(row.m);
        out += ',';
        out += detail::format_float9(row.fraction);
        out += ',';
        out += detail::format_float9(row.mean_mi);
        out += ',';
        out += detail::format_float9(row.std_mi);
        out += ',';
        out += std::to_string(row.n_fragments);
        out += ',';
        out += row.exhaustive ? '1' : '0';
        out += '\n';
    }
    return out;
}

inline std::string ecc_to_csv(const ecc::ErrorRateResult& r) {
    std::string out = "n,p,trials,empirical,analytic\n";
    out += std::to_string(r.n);
    out += ',';
    out += detail::format_float9(r.p);
    out += ',';
    out += std::to_string(r.trials);
    out += ',';
    out += detail::format_float9(r.empirical);
    out += ',';
    out += detail::format_float9(r.analytic);
    out += '\n';
    return out;
}

// --- JSON serialization ------------------------------------------------

inline const char* to_string(SystemInit init) {
    switch (init) {
        case SystemInit::plus: return "plus";
        case SystemInit::zero: return "zero";
        case SystemInit::custom: return "custom";
    }
    throw std::invalid_argument("unknown system_init");
}

inline SystemInit system_init_from_string(const std::string& s) {
    if (s == "plus") return SystemInit::plus;
    if (s == "zero") return SystemInit::zero;
    if (s == "custom") return SystemInit::custom;
    throw std::invalid_argument("unknown system_init: " + s);
}

inline void to_json(nlohmann::json& j, const ModelConfig& c) {
    j = nlohmann::json{
        {"n_env", c.n_env},
        {"copy_angle", c.copy_angle},
        {"system_init", to_string(c.system_init)},
        {"custom_amplitudes",
         {{c.custom_amplitudes[0].real(), c.custom_amplitudes[0].imag()},
          {c.custom_amplitudes[1].real(), c.custom_amplitudes[1].imag()}}},
        {"scattering_rounds", c.scattering_rounds},
        {"scattering_angle", c.scattering_angle},
        {"seed", c.seed},
    };
}

inline void from_json(const nlohmann::json& j, ModelConfig& c) {
    j.at("n_env").get_to(c.n_env);
    j.at("copy_angle").get_to(c.copy_angle);
    c.system_init = system_init_from_string(j.at("system_init").get<std::string>());
    const auto& amps = j.at("custom_amplitudes");
    c.custom_amplitudes[0] = Complex{amps.at(0).at(0).get<double>(), amps.at(0).at(1).get<double>()};
    c.custom_amplitudes[1] = Complex{amps.at(1).at(0).get<double>(), amps.at(1).at(1).get<double>()};
    j.at("scattering_rounds").get_to(c.scattering_rounds);
    j.at("scattering_angle").get_to(c.scattering_angle);
    j.at("seed").get_to(c.seed);
}

inline void to_json(nlohmann::json& j, const ExperimentSpec& s) {
    j = nlohmann::json{
        {"model", s.model},
        {"delta", s.delta},
        {"policy_threshold", s.policy_threshold},
        {"mc_samples", s.mc_samples},
        {"threads", s.threads},
        {"output_path", s.output_path},
        {"format", s.format == OutputFormat::csv ? "csv" : "json"},
    };
}

inline void from_json(const nlohmann::json& j, ExperimentSpec& s) {
    j.at("model").get_to(s.model);
    j.at("delta").get_to(s.delta);
    j.at("policy_threshold").get_to(s.policy_threshold);
    j.at("mc_samples").get_to(s.mc_samples);
    j.at("threads").get_to(s.threads);
    j.at("output_path").get_to(s.output_path);
    const auto format = j.at("format").get<std::string>();
    if (format == "csv") {
        s.format = OutputFormat::csv;
    } else if (format == "json") {
        s.format = OutputFormat::json;
    } else {
        throw std::invalid_argument("unknown format: " + format);
    }
}

inline void to_json(nlohmann::json& j, const MISizeSummary& row) {
    j = nlohmann::json{
        {"m", row.m},
        {"f", row.fraction},
        {"mean_mi_bits", row.mean_mi},
        {"std_mi_bits", row.std_mi},
        {"n_fragments", row.n_fragments},
        {"exhaustive", row.exhaustive},
    };
}

inline void from_json(const nlohmann::json& j, MISizeSummary& row) {
    j.at("m").get_to(row.m);
    j.at("f").get_to(row.fraction);
    j.at("mean_mi_bits").get_to(row.mean_mi);
    j.at("std_mi_bits").get_to(row.std_mi);
    j.at("n_fragments").get_to(row.n_fragments);
    j.at("exhaustive").get_to(row.exhaustive);
}

inline void to_json(nlohmann::json& j, const MICurve& curve) {
    j = nlohmann::json{
        {"n_env", curve.n_env},
        {"h_s_bits", curve.h_s},
        {"pointer_init", curve.pointer_init},
        {"per_size", curve.per_size},
    };
}

inline void from_json(const nlohmann::json& j, MICurve& curve) {
    j.at("n_env").get_to(curve.n_env);
    j.at("h_s_bits").get_to(curve.h_s);
    j.at("pointer_init").get_to(curve.pointer_init);
    j.at("per_size").get_to(curve.per_size);
}

inline void to_json(nlohmann::json& j, const RedundancyResult& r) {
    j = nlohmann::json{
        {"delta", r.delta},
        {"h_s_bits", r.h_s},
        {"achieved", r.achieved},
        {"degenerate", r.degenerate},
    };
    if (r.achieved) {
        j["m_star"] = *r.m_star;
        j["f_delta"] = *r.f_delta;
        j["r_delta"] = *r.r_delta;
    }
}

inline void from_json(const nlohmann::json& j, RedundancyResult& r) {
    j.at("delta").get_to(r.delta);
    j.at("h_s_bits").get_to(r.h_s);
    j.at("achieved").get_to(r.achieved);
    j.at("degenerate").get_to(r.degenerate);
    if (r.achieved) {
        r.m_star = j.at("m_star").get<int>();
        r.f_delta = j.at("f_delta").get<double>();
        r.r_delta = j.at("r_delta").get<double>();
    } else {
        r.m_star.reset();
        r.f_delta.reset();
        r.r_delta.reset();
    }
}

inline void to_json(nlohmann::json& j, const RunRecord& rec) {
    j = nlohmann::json{
        {"tool_version", rec.tool_version},
        {"seed", rec.seed},
        {"spec", rec.spec},
        {"curve", rec.curve},
        {"redundancy", rec.redundancy},
        {"pointer_coherence_before", rec.pointer_coherence_before},
        {"pointer_coherence_after", rec.pointer_coherence_after},
        {"scattering_noop", rec.scattering_noop},
    };
}

inline void from_json(const nlohmann::json& j, RunRecord& rec) {
    j.at("tool_version").get_to(rec.tool_version);
    j.at("seed").get_to(rec.seed);
    j.at("spec").get_to(rec.spec);
    j.at("curve").get_to(rec.curve);
    j.at("redundancy").get_to(rec.redundancy);
    j.at("pointer_coherence_before").get_to(rec.pointer_coherence_before);
    j.at("pointer_coherence_after").get_to(rec.pointer_coherence_after);
    j.at("scattering_noop").get_to(rec.scattering_noop);
}

inline std::string record_to_json_text(const RunRecord& rec) {
    return nlohmann::json(rec).dump(2) + "\n";
}

inline RunRecord record_from_json_text(const std::string& text) {
    return nlohmann::json::parse(text).get<RunRecord>();
}

// --- sweeps ------------------------------------------------------------

enum class SweepParameter { copy_angle, scattering_rounds, n_env };

inline SweepParameter sweep_parameter_from_string(const std::string& s) {
    if (s == "copy_angle") return SweepParameter::copy_angle;
    if (s == "scattering_rounds") return SweepParameter::scattering_rounds;
    if (s == "n_env") return SweepParameter::n_env;
    throw std::invalid_argument("unknown sweep parameter: " + s);
}

inline const char* to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::copy_angle: return "copy_angle";
        case SweepParameter::scattering_rounds: return "scattering_rounds";
        case SweepParameter::n_env: return "n_env";
    }
    throw std::invalid_argument("unknown sweep parameter");
}

struct SweepResult {
    std::vector<double> values;
    std::vector<RunRecord> runs;
};

inline ExperimentSpec with_sweep_value(ExperimentSpec spec, SweepParameter param, double value) {
    switch (param) {
        case SweepParameter::copy_angle:
            spec.model.copy_angle = value;
            break;
        case SweepParameter::scattering_rounds:
            if (value != std::floor(value)) {
                throw std::invalid_argument("scattering_rounds values must be integers");
            }
            spec.model.scattering_rounds = static_cast<int>(value);
            break;
        case SweepParameter::n_env:
            if (value != std::floor(value)) {
                throw std::invalid_argument("n_env values must be integers");
            }
            spec.model.n_env = static_cast<int>(value);
            break;
    }
    return spec;
}

inline SweepResult run_sweep(const ExperimentSpec& base, SweepParameter param,
                             const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("empty sweep");
    SweepResult result;
    result.values = values;
    result.runs.reserve(values.size());
    for (double v : values) {
        result.runs.push_back(run_experiment(with_sweep_value(base, param, v)));
    }
    return result;
}

inline std::string sweep_summary_csv(const SweepResult& sweep) {
    std::string out = "value,h_s_bits,m_star,r_delta\n";
    for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
        const RunRecord& rec = sweep.runs[i];
        out += detail::format_float9(sweep.values[i]);
        out += ',';
        out += detail::format_float9(rec.curve.h_s);
        out += ',';
        if (rec.redundancy.achieved) {
            out += std::to_string(*rec.redundancy.m_star);
            out += ',';
            out += detail::format_float9(*rec.redundancy.r_delta);
        } else {
            out += ',';
        }
        out += '\n';
    }
    return out;
}

// --- file output ---------------------------------------------------------

using ArtifactSet = std::vector<std::pair<std::filesystem::path, std::string>>;

// Stages every file to a temporary sibling before renaming any of them, so
// a failed command never leaves a partial artifact set behind.
inline void write_files_atomic(const ArtifactSet& files) {
    std::vector<std::filesystem::path> staged;
    staged.reserve(files.size());
    try {
        for (const auto& [path, content] : files) {
            if (path.has_parent_path()) {
                std::filesystem::create_directories(path.parent_path());
            }
            const std::filesystem::path tmp = path.string() + ".tmp";
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
            out << content;
            out.close();
            if (!out) throw std::runtime_error("write failed: " + tmp.string());
            staged.push_back(tmp);
        }
        for (std::size_t i = 0; i < files.size(); ++i) {
            std::filesystem::rename(staged[i], files[i].first);
        }
    } catch (...) {
        for (const auto& tmp : staged) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
        }
        throw;
    }
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    write_files_atomic({{path, content}});
}

// <base>.json always carries the full record; <base>.csv carries the curve
// when the csv format is selected.
inline ArtifactSet stage_run_artifacts(const RunRecord& rec,
                                       const std::filesystem::path& base) {
    ArtifactSet files;
    files.emplace_back(base.string() + ".json", record_to_json_text(rec));
    if (rec.spec.format == OutputFormat::csv) {
        files.emplace_back(base.string() + ".csv", curve_to_csv(rec.curve));
    }
    return files;
}

inline std::vector<std::filesystem::path> write_run_artifacts(
    const RunRecord& rec, const std::filesystem::path& base) {
    const ArtifactSet files = stage_run_artifacts(rec, base);
    write_files_atomic(files);
    std::vector<std::filesystem::path> written;
    for (const auto& [path, content] : files) written.push_back(path);
    return written;
}

inline std::vector<std::filesystem::path> write_sweep_artifacts(
    const SweepResult& sweep, const std::filesystem::path& base) {
    ArtifactSet files;
    for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
        const std::filesystem::path run_base = base.string() + ".run" + std::to_string(i);
        const ArtifactSet run_files = stage_run_artifacts(sweep.runs[i], run_base);
        files.insert(files.end(), run_files.begin(), run_files.end());
    }
    files.emplace_back(base.string() + ".summary.csv", sweep_summary_csv(sweep));
    write_files_atomic(files);
    std::vector<std::filesystem::path> written;
    for (const auto& [path, content] : files) written.push_back(path);
    return written;
}

}  // namespace qdarwin
