// Entropy, mutual information I(S:F), fragment ensembles, and the
// redundancy measure R_delta. Entropies are von Neumann entropies in bits.
//
// The global state is always pure here, so the entropy of any subsystem
// subset equals the entropy of its complement; cut entropies are computed
// from the Gram matrix of the smaller side of the bipartition, which keeps
// large-fragment evaluations cheap.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "qdarwin/dynamics.hpp"
#include "qdarwin/hilbert.hpp"
#include "qdarwin/rng.hpp"

namespace qdarwin {

namespace detail {

// -sum lambda log2 lambda with the eigenvalue floor: values below 1e-12
// contribute nothing, values in [-1e-9, 1e-12) are treated as zero, and
// anything below -1e-9 is an internal-consistency failure.
inline double entropy_from_eigenvalues(const Eigen::VectorXd& eigenvalues) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double lambda = eigenvalues[i];
        if (lambda < -1e-9) {
            throw numerical_error("not positive semidefinite");
        }
        if (lambda > 1e-12) {
            h -= lambda * std::log2(lambda);
        }
    }
    return h;
}

inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw numerical_error("eigendecomposition failed");
    }
    return solver.eigenvalues();
}

// Entropy across the (cut | rest) bipartition of a pure state, evaluated
// on whichever side has the smaller dimension. Empty and full cuts carry
// zero entropy by purity.
inline double pure_state_cut_entropy(const QuantumState& psi, std::span<const int> cut) {
    const auto& layout = psi.layout();
    std::vector<int> side = checked_subset(layout, cut);
    std::vector<int> other = complement_of(layout, side);
    if (dims_product(layout, other) < dims_product(layout, side)) {
        side.swap(other);
    }
    if (side.empty()) return 0.0;

    const Matrix m = bipartition_matrix(psi, side);
    const Matrix gram = gram_matrix(m);
    return entropy_from_eigenvalues(hermitian_eigenvalues(gram));
}

}  // namespace detail

inline double von_neumann_entropy(const DensityOperator& rho) {
    return detail::entropy_from_eigenvalues(detail::hermitian_eigenvalues(rho.matrix()));
}

// One evaluated fragment: the three entropies and I(S:F) = H_S + H_F - H_SF.
struct MIPoint {
    Fragment fragment;
    double h_s = 0.0;
    double h_f = 0.0;
    double h_sf = 0.0;
    double mi = 0.0;
};

inline MIPoint mutual_information(const GlobalState& gs, const Fragment& fragment) {
    const int n = gs.config.n_env;
    if (!fragment.empty() && fragment.indices().back() > n) {
        throw std::invalid_argument("invalid subsystem index");
    }

    const std::array<int, 1> system_cut{0};
    const double h_s = detail::pure_state_cut_entropy(gs.state, system_cut);
    if (fragment.empty()) {
        // rho_F is the scalar 1 and H_SF = H_S, so I is zero by bookkeeping.
        return MIPoint{fragment, h_s, 0.0, h_s, 0.0};
    }

    const double h_f = detail::pure_state_cut_entropy(gs.state, fragment.indices());
    std::vector<int> joint{0};
    joint.insert(joint.end(), fragment.indices().begin(), fragment.indices().end());
    const double h_sf = detail::pure_state_cut_entropy(gs.state, joint);
    return MIPoint{fragment, h_s, h_f, h_sf, h_s + h_f - h_sf};
}

// C(n, m), saturating at cap + 1 to keep the comparison overflow-free.
inline std::uint64_t binomial_capped(int n, int m, std::uint64_t cap) {
    if (m < 0 || m > n) return 0;
    m = std::min(m, n - m);
    unsigned __int128 c = 1;
    for (int i = 1; i <= m; ++i) {
        c = c * static_cast<unsigned __int128>(n - m + i) / static_cast<unsigned __int128>(i);
        if (c > cap) return cap + 1;
    }
    return static_cast<std::uint64_t>(c);
}

struct FragmentSampling {
    enum class Mode { exhaustive, monte_carlo };
    Mode mode = Mode::exhaustive;
    int samples = 0;

    static FragmentSampling exhaustive() { return {Mode::exhaustive, 0}; }
    static FragmentSampling monte_carlo(int samples) { return {Mode::monte_carlo, samples}; }
};

// Size-m fragment ensemble. Exhaustive enumeration is lexicographic;
// Monte Carlo draws uniform size-m subsets with replacement, each draw
// keyed by (seed, m, draw index) so the ensemble never depends on
// evaluation order.
inline std::vector<Fragment> fragments_of_size(int n_env, int m, FragmentSampling policy,
                                               std::uint64_t seed = 0) {
    if (m < 0 || m > n_env) {
        throw std::invalid_argument("fragment size out of range");
    }
    std::vector<Fragment> out;
    if (m == 0) {
        out.emplace_back();
        return out;
    }

    if (policy.mode == FragmentSampling::Mode::exhaustive) {
        std::vector<int> combo(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) combo[static_cast<std::size_t>(i)] = i + 1;
        while (true) {
            out.emplace_back(combo);
            int i = m - 1;
            while (i >= 0 && combo[static_cast<std::size_t>(i)] == n_env - (m - 1 - i)) --i;
            if (i < 0) break;
            ++combo[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < m; ++j) {
                combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
            }
        }
        return out;
    }

    if (policy.samples < 1) {
        throw std::invalid_argument("monte carlo sampling needs samples >= 1");
    }
    out.reserve(static_cast<std::size_t>(policy.samples));
    for (int draw = 0; draw < policy.samples; ++draw) {
        rng::CounterStream stream(rng::keyed(seed, rng::Stream::fragment_draw,
                                             static_cast<std::uint64_t>(m),
                                             static_cast<std::uint64_t>(draw)));
        // Partial Fisher-Yates: the first m entries are a uniform subset.
        std::vector<int> pool(static_cast<std::size_t>(n_env));
        for (int i = 0; i < n_env; ++i) pool[static_cast<std::size_t>(i)] = i + 1;
        for (int i = 0; i < m; ++i) {
            const auto j = i + static_cast<int>(stream.next_below(
                                   static_cast<std::uint64_t>(n_env - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        pool.resize(static_cast<std::size_t>(m));
        out.emplace_back(std::move(pool));
    }
    return out;
}

struct MISizeSummary {
    int m = 0;
    double fraction = 0.0;  // m / N
    double mean_mi = 0.0;
    double std_mi = 0.0;
    int n_fragments = 0;
    bool exhaustive = true;

    friend bool operator==(const MISizeSummary&, const MISizeSummary&) = default;
};

struct MICurve {
    int n_env = 0;
    double h_s = 0.0;  // system entropy of the underlying global state
    // Provenance: the system was initialized in a pointer state, so H_S = 0
    // means "nothing to record" rather than "records were never written".
    bool pointer_init = false;
    std::vector<MISizeSummary> per_size;

    friend bool operator==(const MICurve&, const MICurve&) = default;
};

struct SamplingPolicy {
    int exhaustive_threshold = 1000;  // exhaustive when C(N, m) <= threshold
    int mc_samples = 200;
};

namespace detail {

// Static partition of [0, count) across workers; each item is computed
// independently, so the partition never changes the results.
template <typename Body>
void parallel_for(std::int64_t count, int threads, const Body& body) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    const int workers =
        static_cast<int>(std::min<std::int64_t>(threads > 0 ? threads : hw, count));
    if (workers <= 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::int64_t i = w; i < count; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

// Mean and spread of I(S:F) for every fragment size m = 0..N.
// Fragment evaluations may run in parallel; the summary is reduced in
// fragment order, so the curve is identical for any thread count.
inline MICurve mi_curve(const GlobalState& gs, const SamplingPolicy& policy,
                        std::uint64_t seed, int threads = 0) {
    const int n = gs.config.n_env;
    MICurve curve;
    curve.n_env = n;
    const std::array<int, 1> system_cut{0};
    curve.h_s = detail::pure_state_cut_entropy(gs.state, system_cut);
    curve.pointer_init = pointer_state_init(gs.config);
    curve.per_size.reserve(static_cast<std::size_t>(n) + 1);

    for (int m = 0; m <= n; ++m) {
        const std::uint64_t count =
            binomial_capped(n, m, static_cast<std::uint64_t>(policy.exhaustive_threshold));
        const bool exhaustive =
            count <= static_cast<std::uint64_t>(policy.exhaustive_threshold);
        const auto fragments =
            exhaustive ? fragments_of_size(n, m, FragmentSampling::exhaustive())
                       : fragments_of_size(n, m, FragmentSampling::monte_carlo(policy.mc_samples),
                                           seed);

        std::vector<double> mi(fragments.size());
        detail::parallel_for(static_cast<std::int64_t>(fragments.size()), threads,
                             [&](std::int64_t i) {
                                 mi[static_cast<std::size_t>(i)] =
                                     mutual_information(gs, fragments[static_cast<std::size_t>(i)])
                                         .mi;
                             });

        double sum = 0.0;
        for (double v : mi) sum += v;
        const double mean = sum / static_cast<double>(mi.size());
        double sq = 0.0;
        for (double v : mi) sq += (v - mean) * (v - mean);
        const double stddev = std::sqrt(sq / static_cast<double>(mi.size()));

        curve.per_size.push_back(MISizeSummary{m, static_cast<double>(m) / n, mean, stddev,
                                               static_cast<int>(mi.size()), exhaustive});
    }
    return curve;
}

// Redundancy readout. When achieved, r_delta = N / m_star where m_star is
// the smallest fragment size whose mean MI reaches (1 - delta) * H_S.
struct RedundancyResult {
    double delta = 0.0;
    double h_s = 0.0;
    bool achieved = false;
    // H_S = 0: there is no information to deliver, reported as achieved at
    // m_star = 1 by convention and flagged here.
    bool degenerate = false;
    std::optional<int> m_star;
    std::optional<double> f_delta;
    std::optional<double> r_delta;

    friend bool operator==(const RedundancyResult&, const RedundancyResult&) = default;
};

inline RedundancyResult redundancy(const MICurve& curve, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0, 1)");
    }
    RedundancyResult result;
    result.delta = delta;
    result.h_s = curve.h_s;

    const int n = curve.n_env;
    if (curve.h_s <= 1e-12) {
        // No system entropy. A pointer-state start has nothing to deliver,
        // which counts as trivially achieved; a still-coherent system
        // (no record was ever written) has informed no fragment.
        if (curve.pointer_init) {
            result.achieved = true;
            result.degenerate = true;
            result.m_star = 1;
            result.f_delta = 1.0 / n;
            result.r_delta = static_cast<double>(n);
        }
        return result;
    }

    const double threshold = (1.0 - delta) * curve.h_s;
    for (const auto& entry : curve.per_size) {
        if (entry.m >= 1 && entry.mean_mi >= threshold) {
            result.achieved = true;
            result.m_star = entry.m;
            result.f_delta = static_cast<double>(entry.m) / n;
            result.r_delta = static_cast<double>(n) / entry.m;
            break;
        }
    }
    return result;
}

}  // namespace qdarwin
