// System-environment interaction models: a branching step that writes a
// record of the system qubit into each environment qubit, followed by
// optional rounds of pairwise collisions inside the environment that
// degrade those records. The system qubit is never touched by scattering,
// so its reduced state is exactly preserved there.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "qdarwin/hilbert.hpp"
#include "qdarwin/rng.hpp"

namespace qdarwin {

enum class SystemInit { plus, zero, custom };

struct ModelConfig {
    int n_env = 1;
    double copy_angle = std::numbers::pi;  // theta: 0 = no record, pi = perfect copy
    SystemInit system_init = SystemInit::plus;
    std::array<Complex, 2> custom_amplitudes{Complex{1.0, 0.0}, Complex{0.0, 0.0}};
    int scattering_rounds = 0;
    double scattering_angle = 0.0;  // alpha: 0 = identity, pi = full swap
    std::uint64_t seed = 0;

    void validate() const {
        if (n_env < 1) throw std::invalid_argument("n_env must be >= 1");
        if (!(copy_angle >= 0.0 && copy_angle <= std::numbers::pi)) {
            throw std::invalid_argument("copy_angle must lie in [0, pi]");
        }
        if (scattering_rounds < 0) {
            throw std::invalid_argument("scattering_rounds must be >= 0");
        }
        if (!(scattering_angle >= 0.0 && scattering_angle <= std::numbers::pi)) {
            throw std::invalid_argument("scattering_angle must lie in [0, pi]");
        }
        if (system_init == SystemInit::custom) {
            const double n2 = std::norm(custom_amplitudes[0]) + std::norm(custom_amplitudes[1]);
            if (std::abs(n2 - 1.0) > 1e-10) {
                throw std::invalid_argument("custom system amplitudes must be normalized");
            }
        }
    }

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Joint pure state of system + N environment qubits, with the config that
// produced it kept as provenance.
struct GlobalState {
    QuantumState state;
    ModelConfig config;
    // Set when a scattering step was requested but N < 2 leaves nothing to pair.
    bool scattering_noop = false;
};

// Controlled rotation on (system, environment) in the basis |se>:
// the system's |1> branch rotates the environment qubit by theta.
inline Matrix branching_unitary(double theta) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        throw std::invalid_argument("copy_angle must lie in [0, pi]");
    }
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    Matrix u = Matrix::Identity(4, 4);
    u(2, 2) = c;
    u(2, 3) = -s;
    u(3, 2) = s;
    u(3, 3) = c;
    return u;
}

// Two-qubit collision exp(i(alpha/2)(SWAP + 4|++><++|)), equivalently the
// partial swap followed by a phase gate on the transversally aligned pair:
//
//   V(a) = [cos(a/2) I + i sin(a/2) SWAP] * [I + (e^{i 2a} - 1) |++><++|]
//
// A bare partial swap cannot scramble copied records: after branching,
// every environment pair holds identical states within each branch, and
// such symmetric products are eigenvectors of any function of SWAP, so
// pure exchange only shifts a global phase. Worse, any extension that is
// diagonal in the Bell basis still maps computational pair states to
// computational pair states at alpha = pi/2. The |++><++| term acts inside
// the symmetric subspace along a direction tilted against the record
// basis, which makes intermediate angles genuinely entangling while
// keeping the endpoints: alpha = 0 is the identity and alpha = pi is
// exactly i*SWAP (full exchange).
inline Matrix collision_unitary(double alpha) {
    if (!(alpha >= 0.0 && alpha <= std::numbers::pi)) {
        throw std::invalid_argument("scattering_angle must lie in [0, pi]");
    }
    const Complex c{std::cos(alpha / 2.0), 0.0};
    const Complex is{0.0, std::sin(alpha / 2.0)};
    Matrix partial_swap = Matrix::Zero(4, 4);
    partial_swap(0, 0) = c + is;
    partial_swap(3, 3) = c + is;
    partial_swap(1, 1) = c;
    partial_swap(2, 2) = c;
    partial_swap(1, 2) = is;
    partial_swap(2, 1) = is;

    const Complex phase = std::polar(1.0, 2.0 * alpha) - 1.0;
    const Matrix aligned_pair = Matrix::Constant(4, 4, phase / 4.0);
    return partial_swap * (Matrix::Identity(4, 4) + aligned_pair);
}

namespace detail {

inline QuantumState initial_state(const ModelConfig& config) {
    std::array<Complex, 2> sys;
    switch (config.system_init) {
        case SystemInit::plus:
            sys = {Complex{std::numbers::sqrt2 / 2.0, 0.0},
                   Complex{std::numbers::sqrt2 / 2.0, 0.0}};
            break;
        case SystemInit::zero:
            sys = {Complex{1.0, 0.0}, Complex{0.0, 0.0}};
            break;
        case SystemInit::custom:
            sys = config.custom_amplitudes;
            break;
    }
    SubsystemLayout layout = SubsystemLayout::qubits(config.n_env + 1);
    // System is subsystem 0, hence the most significant digit; the
    // environment starts in |0...0>.
    Vector amps = Vector::Zero(layout.total_dimension());
    const std::int64_t sys_stride = layout.stride(0);
    amps[0] = sys[0];
    amps[sys_stride] = sys[1];
    return QuantumState(std::move(layout), std::move(amps));
}

}  // namespace detail

// Couples the system to each environment qubit 1..N in ascending order.
inline GlobalState evolve_branching(const ModelConfig& config) {
    config.validate();
    const Matrix u = branching_unitary(config.copy_angle);
    QuantumState psi = detail::initial_state(config);
    for (int k = 1; k <= config.n_env; ++k) {
        const std::array<int, 2> targets{0, k};
        psi = apply_unitary(psi, u, targets);
    }
    return GlobalState{std::move(psi), config, false};
}

// One scattering round: pairs the environment qubits by a seeded random
// matching and applies the collision unitary to each pair. Pair application
// order is fixed (sorted by first index) so results are reproducible.
inline GlobalState scattering_step(GlobalState gs, int round) {
    const ModelConfig& config = gs.config;
    const int n = config.n_env;
    if (n < 2) {
        gs.scattering_noop = true;
        return gs;
    }

    std::vector<int> env(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) env[static_cast<std::size_t>(i)] = i + 1;
    rng::CounterStream stream(rng::keyed(config.seed, rng::Stream::scattering_pairs,
                                         static_cast<std::uint64_t>(round), 0));
    // Fisher-Yates; a uniform permutation induces a uniform maximal matching.
    for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<int>(stream.next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(env[static_cast<std::size_t>(i)], env[static_cast<std::size_t>(j)]);
    }
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(n / 2));
    for (int i = 0; i + 1 < n; i += 2) {
        int a = env[static_cast<std::size_t>(i)];
        int b = env[static_cast<std::size_t>(i + 1)];
        pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(pairs.begin(), pairs.end());

    const Matrix u = collision_unitary(config.scattering_angle);
    QuantumState psi = std::move(gs.state);
    for (const auto& [a, b] : pairs) {
        const std::array<int, 2> targets{a, b};
        psi = apply_unitary(psi, u, targets);
    }
    return GlobalState{std::move(psi), config, gs.scattering_noop};
}

// Branching followed by the configured number of scattering rounds.
inline GlobalState run_model(const ModelConfig& config) {
    GlobalState gs = evolve_branching(config);
    for (int round = 0; round < config.scattering_rounds; ++round) {
        gs = scattering_step(std::move(gs), round);
    }
    return gs;
}

// True when the system starts in a pointer state (|0> or |1> up to phase):
// its pointer populations then carry no information for the environment
// to record.
inline bool pointer_state_init(const ModelConfig& config) {
    switch (config.system_init) {
        case SystemInit::plus:
            return false;
        case SystemInit::zero:
            return true;
        case SystemInit::custom: {
            const double p0 = std::norm(config.custom_amplitudes[0]);
            const double p1 = std::norm(config.custom_amplitudes[1]);
            return std::min(p0, p1) <= 1e-12;
        }
    }
    return false;
}

// |rho_01| of a 2x2 system state: the pointer-basis coherence. Zero means
// fully decohered; 1/2 is maximal for a balanced superposition.
inline double pointer_coherence(const DensityOperator& rho_s) {
    if (rho_s.dimension() != 2) {
        throw std::invalid_argument("pointer_coherence expects a 2x2 density matrix");
    }
    return std::abs(rho_s.matrix()(0, 1));
}

}  // namespace qdarwin
