// qdarwin: quantum Darwinism simulator CLI.
//
// Subcommands:
//   simulate  one model run: MI curve, redundancy, pointer coherence
//   sweep     simulate across a list of parameter values, plus a summary CSV
//   ecc       repetition-code error-rate experiment
//   version   print the tool version
//
// Options may also come from a key=value file (--config); command-line
// flags override file values. Exit codes: 0 success, 2 invalid arguments
// or configuration, 3 internal numerical-consistency failure.

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "qdarwin/experiment.hpp"
#include "qdarwin/version.hpp"

namespace {

// --- strict string -> number parsing ---------------------------------------

double parse_double(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    if (used != text.size()) throw std::invalid_argument("not a number: '" + text + "'");
    return value;
}

template <typename Int>
Int parse_integer(const std::string& text) {
    Int value{};
    const auto* begin = text.data();
    const auto* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("not an integer: '" + text + "'");
    }
    return value;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(begin, last - begin + 1);
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string token =
            trim(text.substr(start, comma == std::string::npos ? std::string::npos
                                                               : comma - start));
        if (!token.empty()) {
            values.push_back(parse_double(token));
        } else if (comma != std::string::npos || !values.empty()) {
            throw std::invalid_argument("empty entry in list: '" + text + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return values;
}

// --- key=value config files -------------------------------------------------

// Binds config-file keys to the same targets as the long flags. A key is
// applied only when its flag was not given on the command line.
class ConfigBinder {
public:
    void bind(CLI::Option* option, const std::string& key,
              std::function<void(const std::string&)> apply) {
        entries_[key] = Entry{option, std::move(apply)};
    }

    void apply_file(const std::string& path) const {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot read config file: " + path);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string stripped = trim(line);
            if (stripped.empty() || stripped[0] == '#') continue;
            const std::size_t eq = stripped.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            " is not key=value: '" + stripped + "'");
            }
            const std::string key = trim(stripped.substr(0, eq));
            const std::string value = trim(stripped.substr(eq + 1));
            const auto it = entries_.find(key);
            if (it == entries_.end()) {
                throw std::invalid_argument("unknown config key: '" + key + "'");
            }
            if (it->second.option->count() > 0) continue;  // flag overrides file
            it->second.apply(value);
        }
    }

private:
    struct Entry {
        CLI::Option* option = nullptr;
        std::function<void(const std::string&)> apply;
    };
    std::map<std::string, Entry> entries_;
};

// --- shared model/experiment options -----------------------------------------

struct CommonOptions {
    qdarwin::ExperimentSpec spec;
    std::string system_init = "plus";
    std::string system_amps;  // "re0,im0,re1,im1"
    std::string format = "csv";
    std::string config_path;
    ConfigBinder binder;
};

void add_model_options(CLI::App& cmd, CommonOptions& opts) {
    auto bind_int = [&opts](CLI::Option* option, const std::string& key, int& target) {
        opts.binder.bind(option, key,
                         [&target](const std::string& v) { target = parse_integer<int>(v); });
    };
    auto bind_double = [&opts](CLI::Option* option, const std::string& key, double& target) {
        opts.binder.bind(option, key,
                         [&target](const std::string& v) { target = parse_double(v); });
    };
    auto bind_string = [&opts](CLI::Option* option, const std::string& key,
                               std::string& target) {
        opts.binder.bind(option, key, [&target](const std::string& v) { target = v; });
    };

    bind_int(cmd.add_option("--n-env", opts.spec.model.n_env,
                            "number of environment qubits N (1..21)"),
             "n-env", opts.spec.model.n_env);
    bind_double(cmd.add_option("--copy-angle", opts.spec.model.copy_angle,
                               "branching angle theta in radians, [0, pi]; pi copies perfectly"),
                "copy-angle", opts.spec.model.copy_angle);
    bind_string(cmd.add_option("--system-init", opts.system_init,
                               "system start state: plus, zero, or custom")
                    ->check(CLI::IsMember({"plus", "zero", "custom"})),
                "system-init", opts.system_init);
    bind_string(cmd.add_option("--system-amps", opts.system_amps,
                               "custom system amplitudes as re0,im0,re1,im1"),
                "system-amps", opts.system_amps);
    bind_int(cmd.add_option("--scattering-rounds", opts.spec.model.scattering_rounds,
                            "rounds of intra-environment scattering after branching"),
             "scattering-rounds", opts.spec.model.scattering_rounds);
    bind_double(cmd.add_option("--scattering-angle", opts.spec.model.scattering_angle,
                               "partial-swap angle alpha in radians, [0, pi]"),
                "scattering-angle", opts.spec.model.scattering_angle);
    opts.binder.bind(
        cmd.add_option("--seed", opts.spec.model.seed, "seed for every random stream"), "seed",
        [&opts](const std::string& v) {
            opts.spec.model.seed = parse_integer<std::uint64_t>(v);
        });
    bind_double(cmd.add_option("--delta", opts.spec.delta,
                               "information deficit delta for the redundancy threshold"),
                "delta", opts.spec.delta);
    bind_int(cmd.add_option("--policy-threshold", opts.spec.policy_threshold,
                            "evaluate all fragments of a size when C(N,m) <= threshold"),
             "policy-threshold", opts.spec.policy_threshold);
    bind_int(cmd.add_option("--mc-samples", opts.spec.mc_samples,
                            "Monte Carlo fragments per size above the threshold"),
             "mc-samples", opts.spec.mc_samples);
    bind_int(cmd.add_option("--threads", opts.spec.threads,
                            "worker threads for fragment evaluation (0 = hardware)"),
             "threads", opts.spec.threads);
    bind_string(cmd.add_option("--out", opts.spec.output_path, "output base path"), "out",
                opts.spec.output_path);
    bind_string(cmd.add_option("--format", opts.format, "curve artifact format: csv or json")
                    ->check(CLI::IsMember({"csv", "json"})),
                "format", opts.format);
    cmd.add_option("--config", opts.config_path,
                   "read options from a key=value file; flags override");
}

void finalize_spec(CommonOptions& opts) {
    if (!opts.config_path.empty()) opts.binder.apply_file(opts.config_path);
    if (opts.spec.output_path.empty()) {
        throw std::invalid_argument("--out is required (flag or config file)");
    }

    opts.spec.model.system_init = qdarwin::system_init_from_string(opts.system_init);
    if (!opts.system_amps.empty()) {
        if (opts.spec.model.system_init != qdarwin::SystemInit::custom) {
            throw std::invalid_argument("--system-amps requires --system-init custom");
        }
        const std::vector<double> amps = parse_double_list(opts.system_amps);
        if (amps.size() != 4) {
            throw std::invalid_argument("--system-amps needs four numbers: re0,im0,re1,im1");
        }
        opts.spec.model.custom_amplitudes = {qdarwin::Complex{amps[0], amps[1]},
                                             qdarwin::Complex{amps[2], amps[3]}};
    } else if (opts.spec.model.system_init == qdarwin::SystemInit::custom) {
        throw std::invalid_argument("--system-init custom requires --system-amps");
    }
    opts.spec.format = opts.format == "csv" ? qdarwin::OutputFormat::csv
                                            : qdarwin::OutputFormat::json;
    opts.spec.validate();
}

void print_run_summary(const qdarwin::RunRecord& rec) {
    std::cout << "H_S = " << rec.curve.h_s << " bits\n";
    std::cout << "pointer coherence: " << rec.pointer_coherence_before << " -> "
              << rec.pointer_coherence_after << "\n";
    if (rec.redundancy.achieved) {
        std::cout << "redundancy (delta=" << rec.redundancy.delta
                  << "): m*=" << *rec.redundancy.m_star << ", f=" << *rec.redundancy.f_delta
                  << ", R=" << *rec.redundancy.r_delta
                  << (rec.redundancy.degenerate ? " (degenerate: H_S = 0)" : "") << "\n";
    } else {
        std::cout << "redundancy (delta=" << rec.redundancy.delta
                  << "): not achieved at any fragment size\n";
    }
    if (rec.scattering_noop) {
        std::cout << "warning: scattering requested but N < 2; steps were no-ops\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum Darwinism simulator"};
    app.require_subcommand(1);

    CommonOptions sim_opts;
    CLI::App* simulate = app.add_subcommand("simulate", "run one model configuration");
    add_model_options(*simulate, sim_opts);

    CommonOptions sweep_opts;
    std::string sweep_param;
    std::string sweep_values_text;
    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    add_model_options(*sweep, sweep_opts);
    sweep->add_option("--param", sweep_param, "parameter to sweep")
        ->required()
        ->check(CLI::IsMember({"copy_angle", "scattering_rounds", "n_env"}));
    sweep->add_option("--values", sweep_values_text, "comma-separated sweep values")
        ->required();

    int ecc_n = 3;
    double ecc_p = 0.1;
    std::int64_t ecc_trials = 10000;
    std::uint64_t ecc_seed = 0;
    std::string ecc_out;
    std::string ecc_config;
    ConfigBinder ecc_binder;
    CLI::App* ecc_cmd = app.add_subcommand("ecc", "repetition-code error-rate experiment");
    ecc_binder.bind(ecc_cmd->add_option("--n", ecc_n, "repetition length (odd)"), "n",
                    [&ecc_n](const std::string& v) { ecc_n = parse_integer<int>(v); });
    ecc_binder.bind(ecc_cmd->add_option("--p", ecc_p, "bit-flip probability, [0, 1/2]"), "p",
                    [&ecc_p](const std::string& v) { ecc_p = parse_double(v); });
    ecc_binder.bind(
        ecc_cmd->add_option("--trials", ecc_trials, "number of transmissions"), "trials",
        [&ecc_trials](const std::string& v) { ecc_trials = parse_integer<std::int64_t>(v); });
    ecc_binder.bind(
        ecc_cmd->add_option("--seed", ecc_seed, "channel and message seed"), "seed",
        [&ecc_seed](const std::string& v) { ecc_seed = parse_integer<std::uint64_t>(v); });
    ecc_binder.bind(ecc_cmd->add_option("--out", ecc_out, "output base path"), "out",
                    [&ecc_out](const std::string& v) { ecc_out = v; });
    ecc_cmd->add_option("--config", ecc_config,
                        "read options from a key=value file; flags override");

    CLI::App* version = app.add_subcommand("version", "print the tool version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (version->parsed()) {
            std::cout << "qdarwin " << qdarwin::version_string << "\n";
            return 0;
        }
        if (simulate->parsed()) {
            finalize_spec(sim_opts);
            const qdarwin::RunRecord rec = qdarwin::run_experiment(sim_opts.spec);
            const auto files = qdarwin::write_run_artifacts(rec, sim_opts.spec.output_path);
            print_run_summary(rec);
            for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
            return 0;
        }
        if (sweep->parsed()) {
            finalize_spec(sweep_opts);
            const auto param = qdarwin::sweep_parameter_from_string(sweep_param);
            const std::vector<double> values = parse_double_list(sweep_values_text);
            const qdarwin::SweepResult result =
                qdarwin::run_sweep(sweep_opts.spec, param, values);
            const auto files =
                qdarwin::write_sweep_artifacts(result, sweep_opts.spec.output_path);
            for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
            return 0;
        }
        if (ecc_cmd->parsed()) {
            if (!ecc_config.empty()) ecc_binder.apply_file(ecc_config);
            if (ecc_out.empty()) {
                throw std::invalid_argument("--out is required (flag or config file)");
            }
            const qdarwin::ecc::ErrorRateResult result =
                qdarwin::ecc::error_rate_experiment(ecc_n, ecc_p, ecc_trials, ecc_seed);
            qdarwin::write_text_atomic(ecc_out + ".csv", qdarwin::ecc_to_csv(result));
            std::cout << "empirical = " << result.empirical
                      << ", analytic = " << result.analytic << "\n";
            std::cout << "wrote " << ecc_out << ".csv\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qdarwin::numerical_error& e) {
        std::cerr << "internal numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
