#include "usc/correlations_static.hpp"

#include <cmath>

#include "usc/errors.hpp"
#include "usc/parallel.hpp"

namespace usc {

double ChannelDecomposition::interference_numerator() const {
    double total = 0.0;
    std::size_t i = 0;
    while (i < channels.size()) {
        const int f = channels[i].final_state;
        cplx sum = 0.0;
        for (; i < channels.size() && channels[i].final_state == f; ++i) sum += channels[i].amplitude;
        total += std::norm(sum);
    }
    return total;
}

ChannelDecomposition g2_zero_eigenstate(const PositiveFrequencyOperator& oplus, const DressedBasis& basis,
                                        JcLabel initial) {
    if (oplus.dim() != basis.dim()) {
        throw InvalidArgument("g2_zero_eigenstate: operator and basis dimensions differ");
    }
    const int k = basis.index_of(initial);
    const Matrix& o = oplus.matrix;
    const int n = oplus.dim();
    const double threshold = kAllowedTransitionRel * o.cwiseAbs().maxCoeff();

    ChannelDecomposition out;
    out.initial = k;
    out.initial_label = initial;

    double single = 0.0;
    for (int i = 0; i < n; ++i) single += std::norm(o(i, k));
    out.denominator = single * single;

    for (int f = 0; f < n; ++f) {
        cplx sum = 0.0;
        bool reached = false;
        for (int i = 0; i < n; ++i) {
            const cplx first = o(i, k);
            const cplx second = o(f, i);
            const cplx amplitude = second * first;
            if (amplitude == cplx(0.0)) continue;
            const bool allowed = std::abs(first) > threshold && std::abs(second) > threshold;
            reached = reached || allowed;
            out.channels.push_back({i, f, first, second, amplitude, allowed});
            sum += amplitude;
        }
        out.numerator += std::norm(sum);
        if (reached) out.final_states.push_back(f);
    }

    if (out.denominator >= kDarkDenominator) out.g2 = out.numerator / out.denominator;
    return out;
}

std::optional<double> g2_zero_state(const PositiveFrequencyOperator& oplus, const Vector& psi) {
    if (psi.size() != oplus.dim()) throw InvalidArgument("g2_zero_state: state dimension mismatch");
    const Vector once = oplus.matrix * psi;
    const Vector twice = oplus.matrix * once;
    const double single = once.squaredNorm();
    const double denominator = single * single;
    if (denominator < kDarkDenominator) return std::nullopt;
    return twice.squaredNorm() / denominator;
}

std::optional<double> g2_zero_superposition(const PositiveFrequencyOperator& oplus, const DressedBasis& basis,
                                            cplx alpha, JcLabel initial) {
    const double weight = std::norm(alpha);
    if (weight > 1.0 + 1e-12) throw InvalidArgument("g2_zero_superposition: |alpha| must be <= 1");
    if (weight == 0.0) return std::nullopt;
    Vector psi = Vector::Zero(basis.dim());
    psi(basis.index_of(JcLabel::ground())) = std::sqrt(std::max(0.0, 1.0 - weight));
    psi(basis.index_of(initial)) += alpha;
    return g2_zero_state(oplus, psi);
}

G2Table sweep_g2_zero(const SystemParams& templ, std::span<const double> lambda_grid,
                      std::span<const OperatorRequest> operators, JcLabel initial, const LabelingOptions& labeling,
                      unsigned threads) {
    G2Table table;
    table.x.assign(lambda_grid.begin(), lambda_grid.end());
    table.operators.assign(operators.begin(), operators.end());
    table.values.assign(lambda_grid.size(), std::vector<std::optional<double>>(operators.size()));

    const auto bases = sweep_labeled(templ, SweepAxis::lambda, lambda_grid, labeling);
    parallel_for(bases.size(), threads, [&](std::size_t row) {
        const auto& basis = bases[row];
        for (std::size_t c = 0; c < operators.size(); ++c) {
            const auto bare = build_emission_operator(basis.params, operators[c].kind);
            const auto oplus = positive_frequency(bare, basis, operators[c].derivative_order);
            table.values[row][c] = g2_zero_eigenstate(oplus, basis, initial).g2;
        }
    });
    return table;
}

}  // namespace usc
