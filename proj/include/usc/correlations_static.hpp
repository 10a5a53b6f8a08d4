// correlations_static.hpp — zero-delay g2 for eigenstate and weak-superposition preparations

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "usc/dressed_spectrum.hpp"

namespace usc {

// Threshold (relative to max|O+|) above which a transition counts as an allowed decay channel.
inline constexpr double kAllowedTransitionRel = 1e-8;
// Denominators below this mark the initial state as dark.
inline constexpr double kDarkDenominator = 1e-20;

// One two-photon cascade initial -> intermediate -> final.
struct ChannelTerm {
    int intermediate = 0;
    int final_state = 0;
    cplx first_emission;   // O+_{intermediate, initial}
    cplx second_emission;  // O+_{final, intermediate}
    cplx amplitude;        // second_emission * first_emission
    bool allowed = false;  // both steps above the allowed-transition threshold
};

struct ChannelDecomposition {
    int initial = 0;
    std::optional<JcLabel> initial_label;
    std::vector<ChannelTerm> channels;  // every nonzero cascade, grouped by final state
    std::vector<int> final_states;      // final states reached by at least one allowed channel
    double numerator = 0.0;             // sum_f |sum_i amplitude|^2 = <k|O- O- O+ O+|k>
    double denominator = 0.0;           // <k|O- O+|k>^2
    std::optional<double> g2;           // empty for a dark initial state

    bool defined() const { return g2.has_value(); }
    // Numerator rebuilt from the stored channel amplitudes.
    double interference_numerator() const;
};

ChannelDecomposition g2_zero_eigenstate(const PositiveFrequencyOperator& oplus, const DressedBasis& basis,
                                        JcLabel initial);

// Same ratio on sqrt(1 - |alpha|^2)|0> + alpha|initial>, evaluated exactly.
// Empty when alpha = 0 or the state is dark.
std::optional<double> g2_zero_superposition(const PositiveFrequencyOperator& oplus, const DressedBasis& basis,
                                            cplx alpha, JcLabel initial);

// <psi|O- O- O+ O+|psi> / <psi|O- O+|psi>^2 for an arbitrary dressed-basis state vector.
std::optional<double> g2_zero_state(const PositiveFrequencyOperator& oplus, const Vector& psi);

struct OperatorRequest {
    EmissionKind kind = EmissionKind::sigma_x;
    int derivative_order = 0;
};

struct G2Table {
    std::vector<double> x;
    std::vector<OperatorRequest> operators;
    std::vector<std::vector<std::optional<double>>> values;  // values[row][operator]
};

// One row per coupling in lambda_grid. Labels come from a single continuation pass;
// the per-point evaluations are spread over `threads` workers.
G2Table sweep_g2_zero(const SystemParams& templ, std::span<const double> lambda_grid,
                      std::span<const OperatorRequest> operators, JcLabel initial = JcLabel::minus(2),
                      const LabelingOptions& labeling = {}, unsigned threads = 1);

}  // namespace usc
