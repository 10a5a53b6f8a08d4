// dressed_spectrum.hpp — labeled eigenbases, level crossings, positive-frequency operators
//
// Dressed states carry Jaynes-Cummings lineage labels (0, 1-, 1+, 2-, ...) obtained by
// adiabatic continuation: the path starts near lambda = 0 at zero flux bias, where the
// analytic JC doublets are known, ramps lambda to its target and then ramps epsilon.
// At every step each label moves to the new eigenvector with the largest overlap.

#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "usc/operator_algebra.hpp"
#include "usc/rabi_models.hpp"

namespace usc {

enum class Branch { ground, minus, plus };

struct JcLabel {
    int manifold = 0;
    Branch branch = Branch::ground;

    static JcLabel ground() { return {0, Branch::ground}; }
    static JcLabel minus(int n) { return {n, Branch::minus}; }
    static JcLabel plus(int n) { return {n, Branch::plus}; }

    // "0", "1-", "1+", "2-", ...
    std::string str() const;
    static JcLabel parse(std::string_view text);

    // Position in the JC ordering 0, 1-, 1+, 2-, 2+, ...
    int rank() const;
    static JcLabel from_rank(int rank);

    friend bool operator==(const JcLabel&, const JcLabel&) = default;
};

struct DressedBasis {
    SystemParams params;
    RealVector energies;  // ascending
    Matrix states;        // bare-basis columns, orthonormal
    std::vector<std::optional<JcLabel>> labels;
    std::vector<std::optional<int>> parities;  // set only at zero flux bias

    int dim() const { return static_cast<int>(energies.size()); }
    std::optional<int> find(JcLabel label) const;
    int index_of(JcLabel label) const;  // throws InvalidArgument when untracked
    double energy_of(JcLabel label) const { return energies(index_of(label)); }

    // V^dagger O V
    Matrix to_dressed(const OperatorMatrix& bare) const;
};

struct LabelingOptions {
    int n_tracked = 9;             // labels 0 .. 4+
    double seed_lambda = 1e-3;
    double max_step = 5e-3;        // continuation step along lambda or epsilon
    double ambiguity_tol = 1e-6;   // best vs runner-up overlap
    double degeneracy_tol = 1e-9;  // eigenvalues closer than this form one cluster
};

DressedBasis diagonalize_labeled(const SystemParams& p, const LabelingOptions& options = {});
DressedBasis diagonalize_labeled(const SystemParams& p, int n_tracked);

// One continuation step: diagonalize at `next` and inherit labels from `previous`
// by maximal overlap. The caller keeps the step small.
DressedBasis continue_labels(const DressedBasis& previous, const SystemParams& next,
                             const LabelingOptions& options = {});

enum class SweepAxis { lambda, epsilon };

std::string_view to_string(SweepAxis axis);

// Labeled bases at every grid value of the chosen axis, following one continuation path
// (grid must be sorted ascending).
std::vector<DressedBasis> sweep_labeled(const SystemParams& templ, SweepAxis axis, std::span<const double> grid,
                                        const LabelingOptions& options = {});

// Coupling at which energy(label_a) - energy(label_b) changes sign, bracketed by a scan
// on (lo, hi) at the continuation step and refined by bisection to `tol`.
// Throws NoCrossingError when the difference keeps its sign.
double find_crossing(const SystemParams& templ, JcLabel label_a, JcLabel label_b, double lo, double hi,
                     const LabelingOptions& options = {}, double tol = 1e-4);

// Transitions closer than this are neither positive nor negative frequency.
inline constexpr double kDegeneracyCut = 1e-9;

struct PositiveFrequencyOperator {
    Matrix matrix;  // dressed basis, strictly upper triangular in energy order
    int derivative_order = 0;

    Matrix negative() const { return matrix.adjoint(); }
    int dim() const { return static_cast<int>(matrix.rows()); }
    // Leading block on the lowest n dressed states.
    PositiveFrequencyOperator truncated(int n) const;
};

// Entry (i, j) = (-i omega_ji)^order <i|O|j> for omega_j - omega_i > kDegeneracyCut.
PositiveFrequencyOperator positive_frequency(const OperatorMatrix& bare, const DressedBasis& basis,
                                             int derivative_order);

}  // namespace usc
