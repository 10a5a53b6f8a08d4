// operator_algebra.hpp — dense complex operators on the truncated qubit ⊗ Fock space

#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace usc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class SpaceTag { qubit, fock, composite };

std::string_view to_string(SpaceTag tag);

// Square complex matrix tagged with the Hilbert space it acts on.
// Composite ordering is qubit factor first: index = q * (n_max + 1) + n,
// with q = 0 for |e> and q = 1 for |g>.
class OperatorMatrix {
public:
    OperatorMatrix(Matrix entries, SpaceTag space);

    Eigen::Index dim() const { return entries_.rows(); }
    const Matrix& entries() const { return entries_; }
    SpaceTag space() const { return space_; }

    // max |M - M^dagger| <= rel_tol * max|M|
    bool is_hermitian(double rel_tol = 1e-12) const;
    double max_abs() const;

    OperatorMatrix adjoint() const;

    friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator*(cplx s, const OperatorMatrix& a);
    friend OperatorMatrix operator*(double s, const OperatorMatrix& a);

private:
    Matrix entries_;
    SpaceTag space_;
};

OperatorMatrix qubit_identity();
OperatorMatrix pauli_x();
OperatorMatrix pauli_y();
OperatorMatrix pauli_z();
OperatorMatrix sigma_plus();   // |e><g|
OperatorMatrix sigma_minus();  // |g><e|

// Truncated photon annihilation operator on {|0>, ..., |n_max>}.
OperatorMatrix fock_annihilation(int n_max);
OperatorMatrix fock_identity(int n_max);
OperatorMatrix fock_number(int n_max);

// Kronecker product, qubit factor first.
OperatorMatrix tensor(const OperatorMatrix& qubit_op, const OperatorMatrix& fock_op);

struct EigenDecomposition {
    RealVector values;  // ascending
    Matrix vectors;     // column k pairs with values[k]
};

// Hermitian eigensolver. Each eigenvector is rephased so that its
// largest-magnitude component is real and positive (ties go to the lowest index).
EigenDecomposition eig_hermitian(const OperatorMatrix& h, double hermitian_rel_tol = 1e-10);
EigenDecomposition eig_hermitian(const Matrix& h, double hermitian_rel_tol = 1e-10);

// The phase convention above, applied column by column.
void fix_phases(Matrix& vectors);

struct LinearSolution {
    Vector x;
    double rcond = 0.0;          // reciprocal condition estimate
    bool ill_conditioned = false;  // rcond below 1e-12, result still returned
};

// Dense LU solve. Throws SingularSystemError when A is rank deficient.
LinearSolution solve_linear(const Matrix& a, const Vector& b);

}  // namespace usc
