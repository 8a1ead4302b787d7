#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "qdarwin/hilbert.hpp"

using namespace qdarwin;

namespace {

const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

QuantumState qubit(Complex a0, Complex a1) {
    Vector v(2);
    v << a0, a1;
    return QuantumState(SubsystemLayout::qubits(1), v);
}

QuantumState plus_state() { return qubit(inv_sqrt2, inv_sqrt2); }

QuantumState bell_state() {
    Vector v = Vector::Zero(4);
    v[0] = inv_sqrt2;
    v[3] = inv_sqrt2;
    return QuantumState(SubsystemLayout::qubits(2), v);
}

QuantumState ghz_state(int qubits) {
    SubsystemLayout layout = SubsystemLayout::qubits(qubits);
    Vector v = Vector::Zero(layout.total_dimension());
    v[0] = inv_sqrt2;
    v[layout.total_dimension() - 1] = inv_sqrt2;
    return QuantumState(std::move(layout), v);
}

QuantumState random_state(const SubsystemLayout& layout, std::mt19937_64& gen) {
    return QuantumState(layout, oracle::random_state_vector(layout.total_dimension(), gen));
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("layout strides and dimensions", "[hilbert]") {
    SubsystemLayout layout({2, 3, 2});
    CHECK(layout.total_dimension() == 12);
    CHECK(layout.stride(0) == 6);
    CHECK(layout.stride(1) == 2);
    CHECK(layout.stride(2) == 1);
    CHECK_THROWS_AS(SubsystemLayout({2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(layout.check_index(3), std::invalid_argument);
}

TEST_CASE("state construction enforces normalization and length", "[hilbert]") {
    Vector bad(2);
    bad << 1.0, 1.0;
    CHECK_THROWS_AS(QuantumState(SubsystemLayout::qubits(1), bad), std::invalid_argument);
    Vector wrong_len = Vector::Zero(3);
    wrong_len[0] = 1.0;
    CHECK_THROWS_AS(QuantumState(SubsystemLayout::qubits(1), wrong_len), std::invalid_argument);
}

TEST_CASE("tensor product of basis states", "[hilbert]") {
    QuantumState zero = qubit(1.0, 0.0);
    QuantumState one = qubit(0.0, 1.0);

    QuantumState zo = tensor_product(zero, one);  // |01>
    REQUIRE(zo.dimension() == 4);
    CHECK(std::abs(zo.amplitudes()[1] - Complex{1.0, 0.0}) < 1e-15);
    for (int i : {0, 2, 3}) CHECK(std::abs(zo.amplitudes()[i]) < 1e-15);
}

TEST_CASE("tensor product of |+> and |0>", "[hilbert]") {
    QuantumState po = tensor_product(plus_state(), qubit(1.0, 0.0));
    CHECK(std::abs(po.amplitudes()[0] - Complex{inv_sqrt2, 0.0}) < 1e-15);
    CHECK(std::abs(po.amplitudes()[1]) < 1e-15);
    CHECK(std::abs(po.amplitudes()[2] - Complex{inv_sqrt2, 0.0}) < 1e-15);
    CHECK(std::abs(po.amplitudes()[3]) < 1e-15);
}

TEST_CASE("tensor product concatenates layouts", "[hilbert]") {
    QuantumState a = qubit(1.0, 0.0);
    QuantumState b = tensor_product(qubit(1.0, 0.0), qubit(0.0, 1.0));
    QuantumState c = tensor_product(a, b);
    CHECK(c.layout().dims() == std::vector<int>{2, 2, 2});
    CHECK(c.dimension() == 8);
}

TEST_CASE("pure_to_density basics", "[hilbert]") {
    const DensityOperator rho0 = pure_to_density(qubit(1.0, 0.0));
    CHECK(std::abs(rho0.matrix()(0, 0) - Complex{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(rho0.matrix()(1, 1)) < 1e-15);

    const DensityOperator rho_plus = pure_to_density(plus_state());
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            CHECK(std::abs(rho_plus.matrix()(i, j) - Complex{0.5, 0.0}) < 1e-15);
        }
    }

    // Rank one: the only nonzero eigenvalue is 1.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(rho_plus.matrix());
    CHECK(eig.eigenvalues().maxCoeff() == Approx(1.0).margin(1e-12));
    CHECK(eig.eigenvalues().minCoeff() == Approx(0.0).margin(1e-12));
}

TEST_CASE("partial trace of the Bell state", "[hilbert]") {
    const DensityOperator rho = pure_to_density(bell_state());
    const std::vector<int> keep{0};
    const DensityOperator rho_s = partial_trace(rho, bell_state().layout(), keep);
    Matrix expected(2, 2);
    expected << 0.5, 0.0, 0.0, 0.5;
    CHECK(max_abs_diff(rho_s.matrix(), expected) < 1e-12);
}

TEST_CASE("partial trace of a product state recovers the factor", "[hilbert]") {
    std::mt19937_64 gen(11);
    QuantumState psi = random_state(SubsystemLayout::qubits(1), gen);
    QuantumState phi = random_state(SubsystemLayout::qubits(2), gen);
    QuantumState joint = tensor_product(psi, phi);

    const std::vector<int> keep{0};
    const DensityOperator rho_s = partial_trace(pure_to_density(joint), joint.layout(), keep);
    CHECK(max_abs_diff(rho_s.matrix(), pure_to_density(psi).matrix()) < 1e-12);
}

TEST_CASE("partial trace of GHZ3 keeping two qubits", "[hilbert]") {
    QuantumState ghz = ghz_state(3);
    const std::vector<int> keep{0, 1};
    const DensityOperator out = partial_trace(pure_to_density(ghz), ghz.layout(), keep);

    Matrix expected = Matrix::Zero(4, 4);
    expected(0, 0) = 0.5;
    expected(3, 3) = 0.5;
    CHECK(max_abs_diff(out.matrix(), expected) < 1e-12);

    // Independent brute-force oracle agrees.
    const Matrix reference =
        oracle::naive_partial_trace(pure_to_density(ghz).matrix(), {2, 2, 2}, {0, 1});
    CHECK(max_abs_diff(out.matrix(), reference) < 1e-12);
}

TEST_CASE("partial trace rejects bad subsystem indices", "[hilbert]") {
    QuantumState ghz = ghz_state(3);
    const DensityOperator rho = pure_to_density(ghz);
    const std::vector<int> bad{0, 3};
    CHECK_THROWS_WITH(partial_trace(rho, ghz.layout(), bad),
                      Catch::Contains("invalid subsystem index"));
}

TEST_CASE("partial trace preserves trace on random states", "[hilbert]") {
    std::mt19937_64 gen(21);
    for (int rep = 0; rep < 20; ++rep) {
        QuantumState psi = random_state(SubsystemLayout::qubits(3), gen);
        const DensityOperator rho = pure_to_density(psi);
        for (int mask = 0; mask < 8; ++mask) {
            std::vector<int> keep;
            for (int k = 0; k < 3; ++k) {
                if (mask & (1 << k)) keep.push_back(k);
            }
            const DensityOperator out = partial_trace(rho, psi.layout(), keep);
            CHECK(std::abs(out.matrix().trace() - Complex{1.0, 0.0}) < 1e-10);
        }
    }
}

TEST_CASE("partial trace chains", "[hilbert]") {
    std::mt19937_64 gen(31);
    QuantumState psi = random_state(SubsystemLayout::qubits(4), gen);
    const DensityOperator rho = pure_to_density(psi);

    // Discard subsystem 1, then subsystem 3 (index 2 of the intermediate).
    const std::vector<int> keep_first{0, 2, 3};
    const DensityOperator step1 = partial_trace(rho, psi.layout(), keep_first);
    const std::vector<int> keep_second{0, 1};  // original {0, 2}
    const DensityOperator step2 =
        partial_trace(step1, SubsystemLayout(step1.dims()), keep_second);

    const std::vector<int> keep_once{0, 2};
    const DensityOperator direct = partial_trace(rho, psi.layout(), keep_once);
    CHECK(max_abs_diff(step2.matrix(), direct.matrix()) < 1e-12);
}

TEST_CASE("reduced_from_pure matches the dense oracle", "[hilbert]") {
    QuantumState ghz = ghz_state(10);  // 1 system + 9 environment qubits
    const std::vector<int> keep{0, 3};
    const DensityOperator fast = reduced_from_pure(ghz, keep);
    const DensityOperator slow = partial_trace(pure_to_density(ghz), ghz.layout(), keep);
    CHECK(max_abs_diff(fast.matrix(), slow.matrix()) < 1e-12);
}

TEST_CASE("reduced_from_pure trivial keeps", "[hilbert]") {
    std::mt19937_64 gen(41);
    QuantumState psi = random_state(SubsystemLayout::qubits(3), gen);

    std::vector<int> all{0, 1, 2};
    CHECK(max_abs_diff(reduced_from_pure(psi, all).matrix(),
                       pure_to_density(psi).matrix()) < 1e-12);

    const std::vector<int> none{};
    const DensityOperator scalar = reduced_from_pure(psi, none);
    REQUIRE(scalar.dimension() == 1);
    CHECK(std::abs(scalar.matrix()(0, 0) - Complex{1.0, 0.0}) < 1e-12);
}

TEST_CASE("reduced_from_pure equals full-trace route on random states", "[hilbert]") {
    std::mt19937_64 gen(51);
    for (int rep = 0; rep < 100; ++rep) {
        const int qubits = 3 + (rep % 2);
        QuantumState psi = random_state(SubsystemLayout::qubits(qubits), gen);
        const DensityOperator rho = pure_to_density(psi);
        for (int mask = 0; mask < (1 << qubits); ++mask) {
            std::vector<int> keep;
            for (int k = 0; k < qubits; ++k) {
                if (mask & (1 << k)) keep.push_back(k);
            }
            const DensityOperator fast = reduced_from_pure(psi, keep);
            const DensityOperator slow = partial_trace(rho, psi.layout(), keep);
            REQUIRE(max_abs_diff(fast.matrix(), slow.matrix()) < 1e-12);
        }
    }
}

TEST_CASE("schmidt coefficients of product and Bell states", "[hilbert]") {
    const std::vector<int> left{0};

    QuantumState zo = tensor_product(qubit(1.0, 0.0), qubit(0.0, 1.0));
    const auto product_coeffs = schmidt_coefficients(zo, left);
    REQUIRE(product_coeffs.size() == 2);
    CHECK(product_coeffs[0] == Approx(1.0).margin(1e-12));
    CHECK(product_coeffs[1] == Approx(0.0).margin(1e-10));

    const auto bell_coeffs = schmidt_coefficients(bell_state(), left);
    CHECK(bell_coeffs[0] == Approx(inv_sqrt2).margin(1e-12));
    CHECK(bell_coeffs[1] == Approx(inv_sqrt2).margin(1e-12));
}

TEST_CASE("schmidt coefficients square to reduced-state eigenvalues", "[hilbert]") {
    std::mt19937_64 gen(61);
    for (int rep = 0; rep < 20; ++rep) {
        QuantumState psi = random_state(SubsystemLayout::qubits(4), gen);
        const std::vector<int> left{0, 2};
        auto coeffs = schmidt_coefficients(psi, left);

        double sum_sq = 0.0;
        for (double c : coeffs) sum_sq += c * c;
        CHECK(sum_sq == Approx(1.0).margin(1e-10));

        const DensityOperator rho = reduced_from_pure(psi, left);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(rho.matrix());
        Eigen::VectorXd evals = eig.eigenvalues();
        std::sort(evals.data(), evals.data() + evals.size(), std::greater<double>());
        REQUIRE(static_cast<std::size_t>(evals.size()) == coeffs.size());
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            CHECK(coeffs[i] * coeffs[i] ==
                  Approx(evals[static_cast<Eigen::Index>(i)]).margin(1e-10));
        }
    }
}

TEST_CASE("schmidt coefficients reject trivial bipartitions", "[hilbert]") {
    QuantumState bell = bell_state();
    const std::vector<int> none{};
    const std::vector<int> all{0, 1};
    CHECK_THROWS_WITH(schmidt_coefficients(bell, none), Catch::Contains("trivial bipartition"));
    CHECK_THROWS_WITH(schmidt_coefficients(bell, all), Catch::Contains("trivial bipartition"));
}

TEST_CASE("apply_unitary identity and bit flip", "[hilbert]") {
    QuantumState zz = tensor_product(qubit(1.0, 0.0), qubit(1.0, 0.0));  // |00>

    const std::vector<int> both{0, 1};
    QuantumState same = apply_unitary(zz, Matrix::Identity(4, 4), both);
    CHECK((same.amplitudes() - zz.amplitudes()).cwiseAbs().maxCoeff() < 1e-15);

    Matrix x(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    const std::vector<int> target1{1};
    QuantumState flipped = apply_unitary(zz, x, target1);  // |01>
    CHECK(std::abs(flipped.amplitudes()[1] - Complex{1.0, 0.0}) < 1e-15);
}

TEST_CASE("CNOT on |+>|0> produces the Bell state", "[hilbert]") {
    QuantumState in = tensor_product(plus_state(), qubit(1.0, 0.0));
    Matrix cnot = Matrix::Identity(4, 4);
    cnot(2, 2) = 0.0;
    cnot(3, 3) = 0.0;
    cnot(2, 3) = 1.0;
    cnot(3, 2) = 1.0;
    const std::vector<int> targets{0, 1};
    QuantumState out = apply_unitary(in, cnot, targets);
    CHECK((out.amplitudes() - bell_state().amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("apply_unitary rejects bad input", "[hilbert]") {
    QuantumState zz = tensor_product(qubit(1.0, 0.0), qubit(1.0, 0.0));

    Matrix not_unitary(2, 2);
    not_unitary << 1.0, 0.0, 0.0, 2.0;
    const std::vector<int> t0{0};
    CHECK_THROWS_WITH(apply_unitary(zz, not_unitary, t0), Catch::Contains("unitarity violated"));

    const std::vector<int> t01{0, 1};
    CHECK_THROWS_AS(apply_unitary(zz, Matrix::Identity(2, 2), t01), std::invalid_argument);
}

TEST_CASE("apply_unitary preserves norm on random unitaries", "[hilbert]") {
    std::mt19937_64 gen(71);
    for (int rep = 0; rep < 30; ++rep) {
        QuantumState psi = random_state(SubsystemLayout::qubits(4), gen);
        const Matrix u = oracle::random_unitary(4, gen);
        const std::vector<int> targets{1, 3};
        QuantumState out = apply_unitary(psi, u, targets);
        CHECK(std::abs(out.amplitudes().squaredNorm() - 1.0) < 1e-10);
    }
}

TEST_CASE("apply_unitary respects target order", "[hilbert]") {
    // A unitary acting on (a, b) equals the digit-swapped unitary on (b, a).
    std::mt19937_64 gen(81);
    QuantumState psi = random_state(SubsystemLayout::qubits(3), gen);
    const Matrix u = oracle::random_unitary(4, gen);

    Matrix swapped(4, 4);
    const int perm[4] = {0, 2, 1, 3};  // swap the two digit roles
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) swapped(perm[i], perm[j]) = u(i, j);
    }
    const std::vector<int> ab{0, 2};
    const std::vector<int> ba{2, 0};
    QuantumState out1 = apply_unitary(psi, u, ab);
    QuantumState out2 = apply_unitary(psi, swapped, ba);
    CHECK((out1.amplitudes() - out2.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fragment normalizes and validates", "[hilbert]") {
    Fragment f(std::vector<int>{3, 1, 2});
    CHECK(f.indices() == std::vector<int>{1, 2, 3});
    CHECK(f.complement(5) == Fragment(std::vector<int>{4, 5}));
    CHECK(Fragment().empty());
    CHECK_THROWS_AS(Fragment(std::vector<int>{0}), std::invalid_argument);
    CHECK_THROWS_AS(Fragment(std::vector<int>{2, 2}), std::invalid_argument);
}

TEST_CASE("density operator validates its invariants", "[hilbert]") {
    Matrix not_hermitian(2, 2);
    not_hermitian << Complex{0.5, 0.0}, Complex{0.1, 0.0}, Complex{0.3, 0.0}, Complex{0.5, 0.0};
    CHECK_THROWS_AS(DensityOperator({2}, not_hermitian), numerical_error);

    Matrix bad_trace = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityOperator({2}, bad_trace), numerical_error);

    Matrix wrong_shape = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(DensityOperator({2}, wrong_shape), std::invalid_argument);
}
