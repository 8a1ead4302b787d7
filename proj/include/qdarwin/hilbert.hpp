// Dense multipartite pure states and density operators.
//
// Index convention: a basis index is read as a mixed-radix numeral whose
// digits are the subsystem states, with subsystem 0 as the most significant
// digit (Kronecker-product order). For qubit layouts the basis label
// |s0 s1 ... sk> therefore equals the binary numeral s0 s1 ... sk, e.g.
// |01> is index 1 of a two-qubit state. Fragment addressing relies on this
// convention being fixed everywhere.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace qdarwin {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Internal-consistency failures (e.g. a reduced operator that is not
// positive semidefinite). Distinct from std::invalid_argument so callers
// can tell bad input from a broken computation.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double norm_squared(const Vector& v) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::norm(v[i]);
    return s;
}

}  // namespace detail

// Ordered list of subsystem dimensions. Subsystem 0 is the system of
// interest; 1..N are environment subsystems.
class SubsystemLayout {
public:
    SubsystemLayout() = default;

    explicit SubsystemLayout(std::vector<int> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) {
            throw std::invalid_argument("layout needs at least one subsystem");
        }
        for (int d : dims_) {
            if (d < 2) throw std::invalid_argument("subsystem dimension must be >= 2");
        }
    }

    static SubsystemLayout qubits(int count) {
        return SubsystemLayout(std::vector<int>(static_cast<std::size_t>(count), 2));
    }

    int subsystem_count() const { return static_cast<int>(dims_.size()); }

    int dim(int k) const { return dims_.at(static_cast<std::size_t>(k)); }

    const std::vector<int>& dims() const { return dims_; }

    std::int64_t total_dimension() const {
        std::int64_t total = 1;
        for (int d : dims_) total *= d;
        return total;
    }

    // Stride of subsystem k: the index weight of its digit.
    std::int64_t stride(int k) const {
        check_index(k);
        std::int64_t s = 1;
        for (int j = k + 1; j < subsystem_count(); ++j) s *= dims_[static_cast<std::size_t>(j)];
        return s;
    }

    void check_index(int k) const {
        if (k < 0 || k >= subsystem_count()) {
            throw std::invalid_argument("invalid subsystem index");
        }
    }

    friend bool operator==(const SubsystemLayout& a, const SubsystemLayout& b) {
        return a.dims_ == b.dims_;
    }

private:
    std::vector<int> dims_;
};

namespace detail {

// Normalizes a subset of subsystem indices: sorted ascending, unique, in range.
inline std::vector<int> checked_subset(const SubsystemLayout& layout,
                                       std::span<const int> subset) {
    std::vector<int> s(subset.begin(), subset.end());
    std::sort(s.begin(), s.end());
    for (std::size_t i = 0; i < s.size(); ++i) {
        layout.check_index(s[i]);
        if (i > 0 && s[i] == s[i - 1]) {
            throw std::invalid_argument("invalid subsystem index: duplicate");
        }
    }
    return s;
}

inline std::vector<int> complement_of(const SubsystemLayout& layout,
                                      std::span<const int> sorted_subset) {
    std::vector<int> rest;
    rest.reserve(static_cast<std::size_t>(layout.subsystem_count()) - sorted_subset.size());
    std::size_t j = 0;
    for (int k = 0; k < layout.subsystem_count(); ++k) {
        if (j < sorted_subset.size() && sorted_subset[j] == k) {
            ++j;
        } else {
            rest.push_back(k);
        }
    }
    return rest;
}

inline std::int64_t dims_product(const SubsystemLayout& layout, std::span<const int> subset) {
    std::int64_t p = 1;
    for (int k : subset) p *= layout.dim(k);
    return p;
}

// Amplitude-index offsets of every joint state of `subset`, with subset[0]
// as the most significant digit. offsets[r] is the contribution of the
// subset's digits to the full basis index.
inline std::vector<std::int64_t> subset_offsets(const SubsystemLayout& layout,
                                                std::span<const int> subset) {
    std::vector<std::int64_t> offsets{0};
    for (int k : subset) {
        const std::int64_t stride = layout.stride(k);
        const int d = layout.dim(k);
        std::vector<std::int64_t> next;
        next.reserve(offsets.size() * static_cast<std::size_t>(d));
        for (std::int64_t base : offsets) {
            for (int a = 0; a < d; ++a) next.push_back(base + a * stride);
        }
        offsets = std::move(next);
    }
    return offsets;
}

}  // namespace detail

// Normalized pure state over a tensor-product space.
class QuantumState {
public:
    QuantumState(SubsystemLayout layout, Vector amplitudes)
        : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() != layout_.total_dimension()) {
            throw std::invalid_argument("amplitude vector length does not match layout");
        }
        if (std::abs(detail::norm_squared(amplitudes_) - 1.0) > 1e-10) {
            throw std::invalid_argument("state is not normalized");
        }
    }

    // Computational basis state |digits[0] digits[1] ...>.
    static QuantumState basis_state(SubsystemLayout layout, const std::vector<int>& digits) {
        if (static_cast<int>(digits.size()) != layout.subsystem_count()) {
            throw std::invalid_argument("one digit per subsystem required");
        }
        std::int64_t index = 0;
        for (int k = 0; k < layout.subsystem_count(); ++k) {
            if (digits[static_cast<std::size_t>(k)] < 0 ||
                digits[static_cast<std::size_t>(k)] >= layout.dim(k)) {
                throw std::invalid_argument("basis digit out of range");
            }
            index += digits[static_cast<std::size_t>(k)] * layout.stride(k);
        }
        Vector amps = Vector::Zero(layout.total_dimension());
        amps[index] = Complex{1.0, 0.0};
        return QuantumState(std::move(layout), std::move(amps));
    }

    const SubsystemLayout& layout() const { return layout_; }
    const Vector& amplitudes() const { return amplitudes_; }
    std::int64_t dimension() const { return amplitudes_.size(); }

private:
    SubsystemLayout layout_;
    Vector amplitudes_;
};

// Hermitian, unit-trace, positive-semidefinite operator on a subsystem subset.
class DensityOperator {
public:
    DensityOperator(std::vector<int> dims, Matrix matrix)
        : dims_(std::move(dims)), matrix_(std::move(matrix)) {
        std::int64_t total = 1;
        for (int d : dims_) total *= d;
        if (matrix_.rows() != matrix_.cols() || matrix_.rows() != total) {
            throw std::invalid_argument("density matrix shape does not match dims");
        }
        const double herm_dev = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
        if (herm_dev > 1e-10) {
            throw numerical_error("density operator is not Hermitian");
        }
        const Complex tr = matrix_.trace();
        if (std::abs(tr - Complex{1.0, 0.0}) > 1e-10) {
            throw numerical_error("density operator trace differs from one");
        }
    }

    const std::vector<int>& dims() const { return dims_; }
    const Matrix& matrix() const { return matrix_; }
    std::int64_t dimension() const { return matrix_.rows(); }

private:
    std::vector<int> dims_;
    Matrix matrix_;
};

// Subset of environment subsystem indices (1..N). May be empty.
class Fragment {
public:
    Fragment() = default;

    explicit Fragment(std::vector<int> indices) : indices_(std::move(indices)) {
        std::sort(indices_.begin(), indices_.end());
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            if (indices_[i] < 1) {
                throw std::invalid_argument("fragment indices start at 1");
            }
            if (i > 0 && indices_[i] == indices_[i - 1]) {
                throw std::invalid_argument("fragment indices must be distinct");
            }
        }
    }

    const std::vector<int>& indices() const { return indices_; }
    int size() const { return static_cast<int>(indices_.size()); }
    bool empty() const { return indices_.empty(); }

    // Environment indices not in this fragment, for a given N.
    Fragment complement(int n_env) const {
        std::vector<int> rest;
        rest.reserve(static_cast<std::size_t>(n_env) - indices_.size());
        std::size_t j = 0;
        for (int k = 1; k <= n_env; ++k) {
            if (j < indices_.size() && indices_[j] == k) {
                ++j;
            } else {
                rest.push_back(k);
            }
        }
        return Fragment(std::move(rest));
    }

    friend bool operator==(const Fragment& a, const Fragment& b) {
        return a.indices_ == b.indices_;
    }

private:
    std::vector<int> indices_;
};

// |a> ⊗ |b>: a's subsystems keep the most significant digits.
inline QuantumState tensor_product(const QuantumState& a, const QuantumState& b) {
    std::vector<int> dims = a.layout().dims();
    dims.insert(dims.end(), b.layout().dims().begin(), b.layout().dims().end());

    const std::int64_t db = b.dimension();
    Vector amps(a.dimension() * db);
    for (std::int64_t i = 0; i < a.dimension(); ++i) {
        for (std::int64_t j = 0; j < db; ++j) {
            amps[i * db + j] = a.amplitudes()[i] * b.amplitudes()[j];
        }
    }
    return QuantumState(SubsystemLayout(std::move(dims)), std::move(amps));
}

// |psi><psi| as an explicit matrix. Only sensible at small total dimension.
inline DensityOperator pure_to_density(const QuantumState& psi) {
    Matrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
    return DensityOperator(psi.layout().dims(), std::move(rho));
}

// Trace over every subsystem not in `keep`. Result dims follow the kept
// indices in ascending order; the output is re-Hermitized.
inline DensityOperator partial_trace(const DensityOperator& rho,
                                     const SubsystemLayout& layout,
                                     std::span<const int> keep) {
    if (rho.dimension() != layout.total_dimension()) {
        throw std::invalid_argument("density matrix does not match layout");
    }
    const std::vector<int> kept = detail::checked_subset(layout, keep);
    const std::vector<int> rest = detail::complement_of(layout, kept);

    const auto kept_off = detail::subset_offsets(layout, kept);
    const auto rest_off = detail::subset_offsets(layout, rest);
    const auto dk = static_cast<std::int64_t>(kept_off.size());

    Matrix out = Matrix::Zero(dk, dk);
    const Matrix& m = rho.matrix();
    for (std::int64_t b = 0; b < dk; ++b) {
        for (std::int64_t a = 0; a < dk; ++a) {
            Complex sum{0.0, 0.0};
            for (std::int64_t e : rest_off) {
                sum += m(kept_off[static_cast<std::size_t>(a)] + e,
                         kept_off[static_cast<std::size_t>(b)] + e);
            }
            out(a, b) = sum;
        }
    }
    out = ((out + out.adjoint()) / 2.0).eval();

    std::vector<int> out_dims;
    out_dims.reserve(kept.size());
    for (int k : kept) out_dims.push_back(layout.dim(k));
    if (out_dims.empty()) out_dims.push_back(1);
    return DensityOperator(std::move(out_dims), std::move(out));
}

namespace detail {

// Amplitudes reshaped to a (kept x discarded) matrix; rows follow the kept
// subset ascending, columns the complement ascending.
inline Matrix bipartition_matrix(const QuantumState& psi, std::span<const int> kept_sorted) {
    const auto& layout = psi.layout();
    const std::vector<int> rest = complement_of(layout, kept_sorted);
    const auto kept_off = subset_offsets(layout, kept_sorted);
    const auto rest_off = subset_offsets(layout, rest);

    Matrix m(static_cast<std::int64_t>(kept_off.size()),
             static_cast<std::int64_t>(rest_off.size()));
    for (std::size_t e = 0; e < rest_off.size(); ++e) {
        const std::int64_t base = rest_off[e];
        for (std::size_t a = 0; a < kept_off.size(); ++a) {
            m(static_cast<std::int64_t>(a), static_cast<std::int64_t>(e)) =
                psi.amplitudes()[base + kept_off[a]];
        }
    }
    return m;
}

// M * M^dagger via a Hermitian rank update; exactly Hermitian by construction.
inline Matrix gram_matrix(const Matrix& m) {
    Matrix g = Matrix::Zero(m.rows(), m.rows());
    g.selfadjointView<Eigen::Lower>().rankUpdate(m);
    g.triangularView<Eigen::StrictlyUpper>() = g.adjoint();
    return g;
}

}  // namespace detail

// Reduced state of `keep` from a pure global state, without materializing
// the full density matrix: reshape to M and form M * M^dagger.
inline DensityOperator reduced_from_pure(const QuantumState& psi, std::span<const int> keep) {
    const std::vector<int> kept = detail::checked_subset(psi.layout(), keep);
    Matrix m = detail::bipartition_matrix(psi, kept);
    Matrix rho = detail::gram_matrix(m);
    rho = ((rho + rho.adjoint()) / 2.0).eval();

    std::vector<int> out_dims;
    out_dims.reserve(kept.size());
    for (int k : kept) out_dims.push_back(psi.layout().dim(k));
    if (out_dims.empty()) out_dims.push_back(1);
    return DensityOperator(std::move(out_dims), std::move(rho));
}

// Singular values of the (left | rest) bipartition, sorted descending.
// More than one value above 1e-10 certifies entanglement across the cut.
inline std::vector<double> schmidt_coefficients(const QuantumState& psi,
                                                std::span<const int> left) {
    const std::vector<int> left_sorted = detail::checked_subset(psi.layout(), left);
    if (left_sorted.empty() ||
        static_cast<int>(left_sorted.size()) == psi.layout().subsystem_count()) {
        throw std::invalid_argument("trivial bipartition");
    }
    Matrix m = detail::bipartition_matrix(psi, left_sorted);
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    return std::vector<double>(sv.data(), sv.data() + sv.size());
}

// Applies u to the listed subsystems; targets[0] owns u's most significant
// digit. u must be unitary within 1e-10.
inline QuantumState apply_unitary(const QuantumState& psi, const Matrix& u,
                                  std::span<const int> targets) {
    const auto& layout = psi.layout();
    std::int64_t du = 1;
    {
        std::vector<int> seen(targets.begin(), targets.end());
        std::sort(seen.begin(), seen.end());
        for (std::size_t i = 0; i < seen.size(); ++i) {
            layout.check_index(seen[i]);
            if (i > 0 && seen[i] == seen[i - 1]) {
                throw std::invalid_argument("duplicate unitary target");
            }
        }
        for (int k : targets) du *= layout.dim(k);
    }
    if (u.rows() != u.cols() || u.rows() != du) {
        throw std::invalid_argument("unitary dimension does not match targets");
    }
    const double unitarity_dev =
        (u.adjoint() * u - Matrix::Identity(du, du)).cwiseAbs().maxCoeff();
    if (unitarity_dev > 1e-10) {
        throw std::invalid_argument("unitarity violated");
    }

    // Offsets of the target digits in the order given (defines u's basis)
    // and of everything else (enumerates the untouched digits).
    const auto target_off = detail::subset_offsets(layout, targets);
    std::vector<int> targets_sorted(targets.begin(), targets.end());
    std::sort(targets_sorted.begin(), targets_sorted.end());
    const std::vector<int> rest = detail::complement_of(layout, targets_sorted);
    const auto rest_off = detail::subset_offsets(layout, rest);

    Vector out(psi.dimension());
    Vector in_block(du), out_block(du);
    for (std::int64_t base : rest_off) {
        for (std::int64_t t = 0; t < du; ++t) {
            in_block[t] = psi.amplitudes()[base + target_off[static_cast<std::size_t>(t)]];
        }
        out_block.noalias() = u * in_block;
        for (std::int64_t t = 0; t < du; ++t) {
            out[base + target_off[static_cast<std::size_t>(t)]] = out_block[t];
        }
    }
    return QuantumState(layout, std::move(out));
}

}  // namespace qdarwin
