#include "usc/dressed_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "usc/errors.hpp"

namespace usc {

std::string JcLabel::str() const {
    switch (branch) {
        case Branch::ground: return "0";
        case Branch::minus: return std::to_string(manifold) + "-";
        case Branch::plus: return std::to_string(manifold) + "+";
    }
    return "?";
}

JcLabel JcLabel::parse(std::string_view text) {
    if (text == "0") return ground();
    if (text.size() >= 2) {
        const char sign = text.back();
        const std::string digits(text.substr(0, text.size() - 1));
        const bool numeric = !digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) {
            return c >= '0' && c <= '9';
        });
        if (numeric && (sign == '-' || sign == '+')) {
            const int n = std::stoi(digits);
            if (n >= 1) return sign == '-' ? minus(n) : plus(n);
        }
    }
    throw InvalidArgument("bad state label '" + std::string(text) + "' (expected 0, 1-, 1+, 2-, ...)");
}

int JcLabel::rank() const {
    switch (branch) {
        case Branch::ground: return 0;
        case Branch::minus: return 2 * manifold - 1;
        case Branch::plus: return 2 * manifold;
    }
    return -1;
}

JcLabel JcLabel::from_rank(int rank) {
    if (rank < 0) throw InvalidArgument("JcLabel::from_rank: negative rank");
    if (rank == 0) return ground();
    const int n = (rank + 1) / 2;
    return (rank % 2 == 1) ? minus(n) : plus(n);
}

std::optional<int> DressedBasis::find(JcLabel label) const {
    for (int i = 0; i < dim(); ++i) {
        if (labels[i] && *labels[i] == label) return i;
    }
    return std::nullopt;
}

int DressedBasis::index_of(JcLabel label) const {
    if (auto idx = find(label)) return *idx;
    throw InvalidArgument("state " + label.str() + " is not tracked in this basis");
}

Matrix DressedBasis::to_dressed(const OperatorMatrix& bare) const {
    if (bare.dim() != states.rows()) {
        throw InvalidArgument("to_dressed: operator dimension does not match basis");
    }
    return states.adjoint() * bare.entries() * states;
}

std::string_view to_string(SweepAxis axis) {
    return axis == SweepAxis::lambda ? "lambda" : "epsilon";
}

namespace {

struct Reference {
    JcLabel label;
    Vector vector;
};

int bare_index(int qubit, int photons, int n_max) {
    return qubit * (n_max + 1) + photons;
}

// Analytic JC states at zero flux bias. For resonant, uncoupled doublets the
// lambda -> 0+ limit (|g,n> +- |e,n-1>)/sqrt(2) is used.
std::vector<Reference> jc_references(const SystemParams& p, int n_tracked) {
    const int dim = p.dim();
    const double wa = p.omega_a();
    std::vector<Reference> refs;
    refs.reserve(n_tracked);
    for (int rank = 0; rank < n_tracked; ++rank) {
        const JcLabel label = JcLabel::from_rank(rank);
        Vector v = Vector::Zero(dim);
        if (label.branch == Branch::ground) {
            v(bare_index(1, 0, p.n_max)) = 1.0;
        } else {
            const int n = label.manifold;
            const double e_excited = (n - 1) * p.omega_c + 0.5 * wa;
            const double e_ground = n * p.omega_c - 0.5 * wa;
            const double half_gap = 0.5 * (e_excited - e_ground);
            const double coupling = p.lambda * std::sqrt(static_cast<double>(n));
            double angle = 0.5 * std::atan2(coupling, half_gap);
            if (coupling == 0.0 && std::abs(half_gap) < 1e-12) angle = 0.25 * std::numbers::pi;
            const double c = std::cos(angle);
            const double s = std::sin(angle);
            const int ie = bare_index(0, n - 1, p.n_max);
            const int ig = bare_index(1, n, p.n_max);
            if (label.branch == Branch::plus) {
                v(ie) = c;
                v(ig) = s;
            } else {
                v(ie) = -s;
                v(ig) = c;
            }
        }
        refs.push_back({label, std::move(v)});
    }
    return refs;
}

// Within each cluster of (numerically) degenerate eigenvalues, rotate the eigenvectors
// so they follow the reference states; this resolves labels at exact crossings.
void align_degenerate_clusters(EigenDecomposition& eig, const std::vector<Reference>& refs, double tol) {
    const Eigen::Index n = eig.values.size();
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index stop = start + 1;
        while (stop < n && eig.values(stop) - eig.values(stop - 1) < tol) ++stop;
        const Eigen::Index size = stop - start;
        if (size > 1) {
            const Matrix q = eig.vectors.middleCols(start, size);
            std::vector<std::pair<double, Vector>> projected;
            for (const auto& ref : refs) {
                Vector proj = q * (q.adjoint() * ref.vector);
                const double norm = proj.norm();
                if (norm > 1e-3) projected.emplace_back(norm, std::move(proj));
            }
            std::stable_sort(projected.begin(), projected.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            Matrix aligned(q.rows(), size);
            Eigen::Index filled = 0;
            auto try_add = [&](Vector candidate) {
                for (Eigen::Index k = 0; k < filled; ++k) {
                    candidate -= aligned.col(k) * aligned.col(k).dot(candidate);
                }
                const double norm = candidate.norm();
                if (norm > 1e-6) {
                    aligned.col(filled++) = candidate / norm;
                }
            };
            for (auto& [norm, vec] : projected) {
                if (filled == size) break;
                try_add(vec);
            }
            for (Eigen::Index k = 0; k < size && filled < size; ++k) {
                try_add(q.col(k));
            }
            eig.vectors.middleCols(start, size) = aligned;
            const double mean = eig.values.segment(start, size).mean();
            eig.values.segment(start, size).setConstant(mean);
        }
        start = stop;
    }
    fix_phases(eig.vectors);
}

DressedBasis assign_labels(const SystemParams& p, EigenDecomposition eig, const std::vector<Reference>& refs,
                           const LabelingOptions& options) {
    align_degenerate_clusters(eig, refs, options.degeneracy_tol);

    const int dim = static_cast<int>(eig.values.size());
    DressedBasis basis;
    basis.params = p;
    basis.energies = eig.values;
    basis.states = eig.vectors;
    basis.labels.assign(dim, std::nullopt);
    basis.parities.assign(dim, std::nullopt);

    for (const auto& ref : refs) {
        const RealVector overlaps = (eig.vectors.adjoint() * ref.vector).cwiseAbs();
        int best = 0;
        double best_value = -1.0;
        double runner_up = -1.0;
        for (int k = 0; k < dim; ++k) {
            const double value = overlaps(k);
            if (value > best_value) {
                runner_up = best_value;
                best_value = value;
                best = k;
            } else if (value > runner_up) {
                runner_up = value;
            }
        }
        if (best_value - runner_up < options.ambiguity_tol) {
            std::ostringstream msg;
            msg << "label " << ref.label.str() << " is ambiguous at lambda=" << p.lambda << ", epsilon=" << p.epsilon
                << " (overlaps " << best_value << " vs " << runner_up << ")";
            throw LabelAmbiguityError(msg.str());
        }
        if (basis.labels[best]) {
            std::ostringstream msg;
            msg << "labels " << basis.labels[best]->str() << " and " << ref.label.str()
                << " both map to dressed state " << best << " at lambda=" << p.lambda << ", epsilon=" << p.epsilon;
            throw LabelAmbiguityError(msg.str());
        }
        basis.labels[best] = ref.label;
    }

    if (p.epsilon == 0.0) {
        const Matrix parity = eig.vectors.adjoint() * parity_operator(p.n_max).entries() * eig.vectors;
        for (int k = 0; k < dim; ++k) {
            const double value = parity(k, k).real();
            if (std::abs(std::abs(value) - 1.0) <= 1e-8) basis.parities[k] = value > 0 ? 1 : -1;
        }
    }
    return basis;
}

std::vector<Reference> references_from(const DressedBasis& basis) {
    std::vector<Reference> refs;
    for (int k = 0; k < basis.dim(); ++k) {
        if (basis.labels[k]) refs.push_back({*basis.labels[k], basis.states.col(k)});
    }
    std::sort(refs.begin(), refs.end(), [](const Reference& a, const Reference& b) {
        return a.label.rank() < b.label.rank();
    });
    return refs;
}

double axis_value(const SystemParams& p, SweepAxis axis) {
    return axis == SweepAxis::lambda ? p.lambda : p.epsilon;
}

void set_axis(SystemParams& p, SweepAxis axis, double value) {
    if (axis == SweepAxis::lambda) {
        p.lambda = value;
    } else {
        p.epsilon = value;
    }
}

// Walk from `basis` to `target` along one axis in steps no longer than max_step.
DressedBasis advance(DressedBasis basis, SweepAxis axis, double target, const LabelingOptions& options) {
    const double start = axis_value(basis.params, axis);
    const double span = target - start;
    const int steps = static_cast<int>(std::ceil(std::abs(span) / options.max_step - 1e-12));
    for (int s = 1; s <= steps; ++s) {
        SystemParams next = basis.params;
        set_axis(next, axis, s == steps ? target : start + span * s / steps);
        basis = continue_labels(basis, next, options);
    }
    return basis;
}

void check_tracking(const SystemParams& p, const LabelingOptions& options) {
    if (options.n_tracked < 1) throw InvalidArgument("n_tracked must be >= 1");
    if (options.n_tracked > p.dim()) throw InvalidArgument("n_tracked exceeds the Hilbert-space dimension");
    const int top_manifold = JcLabel::from_rank(options.n_tracked - 1).manifold;
    if (top_manifold > p.n_max) {
        throw InvalidArgument("n_tracked = " + std::to_string(options.n_tracked) + " needs n_max >= " +
                              std::to_string(top_manifold));
    }
    if (!(options.max_step > 0.0)) throw InvalidArgument("continuation max_step must be > 0");
}

}  // namespace

DressedBasis diagonalize_labeled(const SystemParams& p, int n_tracked) {
    LabelingOptions options;
    options.n_tracked = n_tracked;
    return diagonalize_labeled(p, options);
}

DressedBasis diagonalize_labeled(const SystemParams& p, const LabelingOptions& options) {
    p.validate();
    check_tracking(p, options);

    SystemParams seed = p;
    seed.epsilon = 0.0;
    if (seed.delta <= 0.0) {
        throw InvalidArgument("labeling needs delta > 0: the continuation path starts at zero flux bias");
    }
    seed.lambda = std::min(options.seed_lambda, p.lambda);

    auto refs = jc_references(seed, options.n_tracked);
    DressedBasis basis = assign_labels(seed, eig_hermitian(build_hamiltonian(seed)), refs, options);
    basis = advance(std::move(basis), SweepAxis::lambda, p.lambda, options);
    basis = advance(std::move(basis), SweepAxis::epsilon, p.epsilon, options);
    basis.params = p;
    return basis;
}

DressedBasis continue_labels(const DressedBasis& previous, const SystemParams& next,
                             const LabelingOptions& options) {
    next.validate();
    if (next.n_max != previous.params.n_max) {
        throw InvalidArgument("continue_labels: n_max changed along the path");
    }
    return assign_labels(next, eig_hermitian(build_hamiltonian(next)), references_from(previous), options);
}

std::vector<DressedBasis> sweep_labeled(const SystemParams& templ, SweepAxis axis, std::span<const double> grid,
                                        const LabelingOptions& options) {
    if (grid.empty()) return {};
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw InvalidArgument("sweep grid must be sorted ascending");
    }
    SystemParams first = templ;
    set_axis(first, axis, grid.front());
    std::vector<DressedBasis> out;
    out.reserve(grid.size());
    out.push_back(diagonalize_labeled(first, options));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        out.push_back(advance(out.back(), axis, grid[i], options));
    }
    return out;
}

double find_crossing(const SystemParams& templ, JcLabel label_a, JcLabel label_b, double lo, double hi,
                     const LabelingOptions& options, double tol) {
    if (!(hi > lo)) throw InvalidArgument("find_crossing: empty coupling range");
    if (!(tol > 0.0)) throw InvalidArgument("find_crossing: tolerance must be > 0");

    std::vector<double> grid;
    const int steps = static_cast<int>(std::ceil((hi - lo) / options.max_step - 1e-12));
    for (int s = 0; s <= steps; ++s) grid.push_back(s == steps ? hi : lo + (hi - lo) * s / steps);

    const auto bases = sweep_labeled(templ, SweepAxis::lambda, grid, options);
    auto gap = [&](const DressedBasis& b) { return b.energy_of(label_a) - b.energy_of(label_b); };

    for (std::size_t i = 0; i + 1 < bases.size(); ++i) {
        const double g0 = gap(bases[i]);
        const double g1 = gap(bases[i + 1]);
        if (g0 == 0.0) return grid[i];
        if ((g0 > 0.0) == (g1 > 0.0) && g1 != 0.0) continue;

        DressedBasis left = bases[i];
        double a = grid[i];
        double b = grid[i + 1];
        double ga = g0;
        while (b - a > tol) {
            const double mid = 0.5 * (a + b);
            SystemParams p = left.params;
            p.lambda = mid;
            DressedBasis probe = continue_labels(left, p, options);
            const double gm = gap(probe);
            if (gm == 0.0) return mid;
            if ((gm > 0.0) == (ga > 0.0)) {
                a = mid;
                ga = gm;
                left = std::move(probe);
            } else {
                b = mid;
            }
        }
        return 0.5 * (a + b);
    }
    std::ostringstream msg;
    msg << "no crossing of " << label_a.str() << " and " << label_b.str() << " in lambda range [" << lo << ", " << hi
        << "]";
    throw NoCrossingError(msg.str());
}

PositiveFrequencyOperator PositiveFrequencyOperator::truncated(int n) const {
    if (n < 1 || n > dim()) throw InvalidArgument("truncated: level count out of range");
    return {matrix.topLeftCorner(n, n), derivative_order};
}

PositiveFrequencyOperator positive_frequency(const OperatorMatrix& bare, const DressedBasis& basis,
                                             int derivative_order) {
    if (derivative_order < 0 || derivative_order > 2) {
        throw InvalidArgument("derivative_order must be 0, 1 or 2");
    }
    const Matrix dressed = basis.to_dressed(bare);
    const int n = basis.dim();
    Matrix out = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            const double omega_ji = basis.energies(j) - basis.energies(i);
            if (omega_ji <= kDegeneracyCut) continue;
            cplx weight(1.0, 0.0);
            for (int d = 0; d < derivative_order; ++d) weight *= cplx(0.0, -omega_ji);
            out(i, j) = weight * dressed(i, j);
        }
    }
    return {std::move(out), derivative_order};
}

}  // namespace usc
