#include "usc/operator_algebra.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "usc/errors.hpp"

namespace usc {

std::string_view to_string(SpaceTag tag) {
    switch (tag) {
        case SpaceTag::qubit: return "qubit";
        case SpaceTag::fock: return "fock";
        case SpaceTag::composite: return "composite";
    }
    return "unknown";
}

OperatorMatrix::OperatorMatrix(Matrix entries, SpaceTag space)
    : entries_(std::move(entries)), space_(space) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        std::ostringstream msg;
        msg << "operator must be square and nonempty, got " << entries_.rows() << "x" << entries_.cols();
        throw InvalidArgument(msg.str());
    }
    if (space_ == SpaceTag::qubit && entries_.rows() != 2) {
        throw InvalidArgument("qubit-tagged operator must be 2x2");
    }
}

double OperatorMatrix::max_abs() const {
    return entries_.cwiseAbs().maxCoeff();
}

bool OperatorMatrix::is_hermitian(double rel_tol) const {
    const double scale = max_abs();
    if (scale == 0.0) return true;
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

OperatorMatrix OperatorMatrix::adjoint() const {
    return OperatorMatrix(entries_.adjoint(), space_);
}

namespace {

void require_same_space(const OperatorMatrix& a, const OperatorMatrix& b, const char* op) {
    if (a.space() != b.space() || a.dim() != b.dim()) {
        std::ostringstream msg;
        msg << "operator " << op << ": mismatched operands (" << to_string(a.space()) << " dim " << a.dim()
            << " vs " << to_string(b.space()) << " dim " << b.dim() << ")";
        throw InvalidArgument(msg.str());
    }
}

}  // namespace

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_space(a, b, "+");
    return OperatorMatrix(a.entries_ + b.entries_, a.space_);
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_space(a, b, "-");
    return OperatorMatrix(a.entries_ - b.entries_, a.space_);
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_space(a, b, "*");
    return OperatorMatrix(a.entries_ * b.entries_, a.space_);
}

OperatorMatrix operator*(cplx s, const OperatorMatrix& a) {
    return OperatorMatrix(s * a.entries_, a.space_);
}

OperatorMatrix operator*(double s, const OperatorMatrix& a) {
    return OperatorMatrix(s * a.entries_, a.space_);
}

OperatorMatrix qubit_identity() {
    return OperatorMatrix(Matrix::Identity(2, 2), SpaceTag::qubit);
}

OperatorMatrix pauli_x() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return OperatorMatrix(std::move(m), SpaceTag::qubit);
}

OperatorMatrix pauli_y() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = cplx(0.0, -1.0);
    m(1, 0) = cplx(0.0, 1.0);
    return OperatorMatrix(std::move(m), SpaceTag::qubit);
}

OperatorMatrix pauli_z() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return OperatorMatrix(std::move(m), SpaceTag::qubit);
}

OperatorMatrix sigma_plus() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return OperatorMatrix(std::move(m), SpaceTag::qubit);
}

OperatorMatrix sigma_minus() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return OperatorMatrix(std::move(m), SpaceTag::qubit);
}

OperatorMatrix fock_annihilation(int n_max) {
    if (n_max < 1) {
        throw InvalidArgument("fock_annihilation: n_max must be >= 1 (got " + std::to_string(n_max) + ")");
    }
    Matrix a = Matrix::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return OperatorMatrix(std::move(a), SpaceTag::fock);
}

OperatorMatrix fock_identity(int n_max) {
    if (n_max < 1) {
        throw InvalidArgument("fock_identity: n_max must be >= 1 (got " + std::to_string(n_max) + ")");
    }
    return OperatorMatrix(Matrix::Identity(n_max + 1, n_max + 1), SpaceTag::fock);
}

OperatorMatrix fock_number(int n_max) {
    const auto a = fock_annihilation(n_max);
    return a.adjoint() * a;
}

OperatorMatrix tensor(const OperatorMatrix& qubit_op, const OperatorMatrix& fock_op) {
    if (qubit_op.space() != SpaceTag::qubit || fock_op.space() != SpaceTag::fock) {
        std::ostringstream msg;
        msg << "tensor expects (qubit, fock) operands, got (" << to_string(qubit_op.space()) << ", "
            << to_string(fock_op.space()) << ")";
        throw InvalidArgument(msg.str());
    }
    const Matrix& q = qubit_op.entries();
    const Matrix& f = fock_op.entries();
    const Eigen::Index nf = f.rows();
    Matrix out(2 * nf, 2 * nf);
    for (Eigen::Index i = 0; i < 2; ++i) {
        for (Eigen::Index j = 0; j < 2; ++j) {
            out.block(i * nf, j * nf, nf, nf) = q(i, j) * f;
        }
    }
    return OperatorMatrix(std::move(out), SpaceTag::composite);
}

EigenDecomposition eig_hermitian(const OperatorMatrix& h, double hermitian_rel_tol) {
    return eig_hermitian(h.entries(), hermitian_rel_tol);
}

EigenDecomposition eig_hermitian(const Matrix& h, double hermitian_rel_tol) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw InvalidArgument("eig_hermitian: matrix must be square and nonempty");
    }
    const double scale = h.cwiseAbs().maxCoeff();
    const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (asym > hermitian_rel_tol * std::max(scale, 1e-300)) {
        std::ostringstream msg;
        msg << "eig_hermitian: input is not hermitian (max|H - H^dagger| = " << asym << ", max|H| = " << scale
            << ")";
        throw InvalidArgument(msg.str());
    }

    // Symmetrize so roundoff in the input cannot leak into the solver.
    const Matrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eig_hermitian: eigensolver did not converge");
    }

    EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
    fix_phases(out.vectors);
    return out;
}

void fix_phases(Matrix& vectors) {
    for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
        auto col = vectors.col(k);
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            // Relative slack keeps the pivot stable under roundoff between equal-magnitude entries.
            const double mag = std::abs(col(i));
            if (mag > best * (1.0 + 1e-9)) {
                best = mag;
                pivot = i;
            }
        }
        if (best <= 0.0) continue;
        const cplx phase = col(pivot) / std::abs(col(pivot));
        col /= phase;
        col(pivot) = cplx(col(pivot).real(), 0.0);
    }
}

LinearSolution solve_linear(const Matrix& a, const Vector& b) {
    if (a.rows() != a.cols() || a.rows() != b.size()) {
        throw InvalidArgument("solve_linear: A must be square and match b");
    }
    Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible()) {
        std::ostringstream msg;
        msg << "solve_linear: singular system (rank " << lu.rank() << " of " << a.rows() << ")";
        throw SingularSystemError(msg.str());
    }
    LinearSolution out;
    out.x = lu.solve(b);
    out.rcond = lu.rcond();
    out.ill_conditioned = out.rcond < 1e-12;
    return out;
}

}  // namespace usc
