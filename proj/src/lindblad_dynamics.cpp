#include "usc/lindblad_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <boost/numeric/odeint.hpp>

#include "usc/correlations_static.hpp"
#include "usc/errors.hpp"
#include "usc/parallel.hpp"

namespace usc {

std::string_view to_string(DriveMode mode) {
    return mode == DriveMode::dressed_rwa ? "dressed_rwa" : "full_time";
}

std::string_view to_string(SpectralWeight weight) {
    return weight == SpectralWeight::ohmic ? "ohmic" : "flat";
}

std::string_view to_string(QubitBath bath) {
    return bath == QubitBath::i_theta ? "i_theta" : "sigma_x";
}

std::string_view to_string(BathChannel channel) {
    return channel == BathChannel::cavity ? "cavity" : "qubit";
}

DriveMode parse_drive_mode(std::string_view text) {
    if (text == "dressed_rwa") return DriveMode::dressed_rwa;
    if (text == "full_time") return DriveMode::full_time;
    throw InvalidArgument("unknown drive mode '" + std::string(text) + "' (expected dressed_rwa or full_time)");
}

SpectralWeight parse_spectral_weight(std::string_view text) {
    if (text == "ohmic") return SpectralWeight::ohmic;
    if (text == "flat") return SpectralWeight::flat;
    throw InvalidArgument("unknown spectral weight '" + std::string(text) + "' (expected ohmic or flat)");
}

QubitBath parse_qubit_bath(std::string_view text) {
    if (text == "i_theta") return QubitBath::i_theta;
    if (text == "sigma_x") return QubitBath::sigma_x;
    throw InvalidArgument("unknown qubit bath '" + std::string(text) + "' (expected i_theta or sigma_x)");
}

namespace {

Eigen::Index vec_index(Eigen::Index row, Eigen::Index col, Eigen::Index n) {
    return row + col * n;
}

// -i [H, .] as a column-stacked superoperator.
Matrix commutator_superoperator(const Matrix& h) {
    const Eigen::Index n = h.rows();
    Matrix out = Matrix::Zero(n * n, n * n);
    const cplx minus_i(0.0, -1.0);
    for (Eigen::Index b = 0; b < n; ++b) {
        for (Eigen::Index a = 0; a < n; ++a) {
            const Eigen::Index row = vec_index(a, b, n);
            for (Eigen::Index c = 0; c < n; ++c) {
                if (h(a, c) != cplx(0.0)) out(row, vec_index(c, b, n)) += minus_i * h(a, c);
                if (h(c, b) != cplx(0.0)) out(row, vec_index(a, c, n)) -= minus_i * h(c, b);
            }
        }
    }
    return out;
}

double spectral_weight(SpectralWeight weight, double x) {
    return weight == SpectralWeight::ohmic ? x : 1.0;
}

}  // namespace

DriveFrame resonant_drive_frame(const RealVector& energies, const Matrix& drive_elements, double drive_frequency,
                                double resonance_cut) {
    const int n = static_cast<int>(energies.size());
    DriveFrame frame;
    frame.quanta.assign(n, 0);
    if (!(drive_frequency > 0.0)) return frame;

    const double scale = drive_elements.cwiseAbs().maxCoeff();
    std::vector<std::pair<int, int>> candidates;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < k; ++j) {
            const double omega_kj = energies(k) - energies(j);
            if (std::abs(omega_kj - drive_frequency) <= resonance_cut &&
                std::abs(drive_elements(j, k)) > 1e-12 * scale) {
                candidates.emplace_back(j, k);
            }
        }
    }

    // Breadth-first ladder over resonant pairs, seeded at the lowest unassigned level.
    std::vector<bool> assigned(n, false);
    for (int seed = 0; seed < n; ++seed) {
        if (assigned[seed]) continue;
        frame.quanta[seed] =
            seed == 0 ? 0 : static_cast<int>(std::lround((energies(seed) - energies(0)) / drive_frequency));
        assigned[seed] = true;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& [j, k] : candidates) {
                if (assigned[j] && !assigned[k]) {
                    frame.quanta[k] = frame.quanta[j] + 1;
                    assigned[k] = true;
                    changed = true;
                } else if (assigned[k] && !assigned[j]) {
                    frame.quanta[j] = frame.quanta[k] - 1;
                    assigned[j] = true;
                    changed = true;
                }
            }
        }
    }
    for (const auto& [j, k] : candidates) {
        if (frame.quanta[k] == frame.quanta[j] + 1) {
            frame.resonant_pairs.emplace_back(j, k);
        } else {
            ++frame.dropped;
        }
    }
    return frame;
}

Matrix LindbladGenerator::coherent_hamiltonian(double t) const {
    Matrix h = effective_drive;
    if (mode == DriveMode::full_time) h *= std::cos(drive_frequency * t);
    h.diagonal() += frame_energies.cast<cplx>();
    return h;
}

Matrix LindbladGenerator::apply(const Eigen::Ref<const Matrix>& rho, double t) const {
    const Matrix h = coherent_hamiltonian(t);
    Matrix out = cplx(0.0, -1.0) * (h * rho - rho * h);
    for (int b = 0; b < dim; ++b) {
        for (int a = 0; a < dim; ++a) out(a, b) -= 0.5 * (decay(a) + decay(b)) * rho(a, b);
    }
    for (int k = 0; k < dim; ++k) {
        const cplx pk = rho(k, k);
        for (int j = 0; j < dim; ++j) {
            if (rates(j, k) != 0.0) out(j, j) += rates(j, k) * pk;
        }
    }
    return out;
}

Matrix LindbladGenerator::superoperator_at(double t) const {
    if (!time_dependent()) return superoperator;
    return superoperator + std::cos(drive_frequency * t) * drive_superoperator;
}

LindbladGenerator build_liouvillian(const DressedBasis& basis, const SystemParams& p, const LindbladOptions& options) {
    p.validate();
    const int n = options.n_levels;
    if (n < 2 || n > basis.dim()) {
        throw InvalidArgument("n_levels must be in [2, " + std::to_string(basis.dim()) + "]");
    }
    if (!(options.resonance_cut >= 0.0)) throw InvalidArgument("resonance_cut must be >= 0");

    LindbladGenerator gen;
    gen.dim = n;
    gen.mode = options.drive_mode;
    gen.drive_frequency = p.drive_frequency;
    gen.drive_amplitude = p.drive_amplitude;
    gen.energies = basis.energies.head(n);

    const Matrix cavity = basis.to_dressed(build_drive_operator(p)).topLeftCorner(n, n);
    const auto qubit_kind = options.qubit_bath == QubitBath::i_theta ? EmissionKind::i_theta : EmissionKind::sigma_x;
    const Matrix qubit = basis.to_dressed(build_emission_operator(p, qubit_kind)).topLeftCorner(n, n);
    const double omega_a = p.omega_a();

    gen.rates = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < k; ++j) {
            const double omega_kj = gen.energies(k) - gen.energies(j);
            if (omega_kj <= kDegeneracyCut) continue;
            const double cavity_rate =
                p.kappa * spectral_weight(options.spectral_weight, omega_kj / p.omega_c) * std::norm(cavity(j, k));
            const double qubit_rate =
                p.gamma * spectral_weight(options.spectral_weight, omega_kj / omega_a) * std::norm(qubit(j, k));
            if (cavity_rate > 0.0) gen.jump_terms.push_back({cavity_rate, j, k, BathChannel::cavity});
            if (qubit_rate > 0.0) gen.jump_terms.push_back({qubit_rate, j, k, BathChannel::qubit});
            gen.rates(j, k) = cavity_rate + qubit_rate;
        }
    }
    gen.decay = gen.rates.colwise().sum().transpose();

    const double e0 = gen.energies(0);
    gen.effective_drive = Matrix::Zero(n, n);
    if (options.drive_mode == DriveMode::dressed_rwa) {
        const DriveFrame frame = resonant_drive_frame(gen.energies, cavity, p.drive_frequency, options.resonance_cut);
        gen.drive_quanta = frame.quanta;
        gen.dropped_drive_elements = frame.dropped;
        gen.frame_energies.resize(n);
        for (int k = 0; k < n; ++k) gen.frame_energies(k) = gen.energies(k) - e0 - frame.quanta[k] * p.drive_frequency;
        if (p.drive_amplitude != 0.0) {
            for (const auto& [j, k] : frame.resonant_pairs) {
                gen.effective_drive(j, k) = 0.5 * p.drive_amplitude * cavity(j, k);
                gen.effective_drive(k, j) = std::conj(gen.effective_drive(j, k));
            }
        }
    } else {
        gen.drive_quanta.assign(n, 0);
        gen.frame_energies = gen.energies.array() - e0;
        gen.effective_drive = p.drive_amplitude * 0.5 * (cavity + cavity.adjoint());
    }

    // Static superoperator: coherent part plus dissipators.
    Matrix static_h = Matrix::Zero(n, n);
    static_h.diagonal() = gen.frame_energies.cast<cplx>();
    if (options.drive_mode == DriveMode::dressed_rwa) static_h += gen.effective_drive;
    gen.superoperator = commutator_superoperator(static_h);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < k; ++j) {
            const double r = gen.rates(j, k);
            if (r == 0.0) continue;
            gen.superoperator(vec_index(j, j, n), vec_index(k, k, n)) += r;
        }
    }
    for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) {
            gen.superoperator(vec_index(a, b, n), vec_index(a, b, n)) -= 0.5 * (gen.decay(a) + gen.decay(b));
        }
    }
    if (gen.time_dependent()) gen.drive_superoperator = commutator_superoperator(gen.effective_drive);
    return gen;
}

double DensityState::min_eigenvalue() const {
    const Matrix sym = 0.5 * (matrix + matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double DensityState::hermiticity_error() const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

DensityState steady_state(const LindbladGenerator& generator) {
    if (generator.time_dependent()) {
        throw InvalidArgument("steady_state needs a time-independent generator (dressed_rwa or undriven)");
    }
    const int n = generator.dim;
    const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
    const Matrix& l = generator.superoperator;

    Eigen::FullPivLU<Matrix> kernel_check(l);
    kernel_check.setThreshold(1e-12);
    const Eigen::Index nullity = nn - kernel_check.rank();
    if (nullity != 1) {
        std::ostringstream msg;
        msg << "steady_state: Liouvillian kernel has dimension " << nullity << " (expected 1)";
        throw DegenerateKernelError(msg.str());
    }

    Matrix system = l;
    Vector rhs = Vector::Zero(nn);
    system.row(0).setZero();
    for (int a = 0; a < n; ++a) system(0, vec_index(a, a, n)) = 1.0;
    rhs(0) = 1.0;
    const LinearSolution sol = solve_linear(system, rhs);

    DensityState out;
    out.matrix = Eigen::Map<const Matrix>(sol.x.data(), n, n);
    out.matrix = 0.5 * (out.matrix + out.matrix.adjoint());
    out.matrix /= out.matrix.trace();
    return out;
}

namespace {

using OdeState = std::vector<cplx>;

// Integration runs in the interaction picture of the diagonal frame energies. The
// per-transition dissipators commute with that rotation, so only the drive picks up phases.
struct InteractionPicture {
    const LindbladGenerator& gen;

    Vector rotation(double t) const {
        Vector u(gen.dim);
        for (int a = 0; a < gen.dim; ++a) u(a) = std::polar(1.0, gen.frame_energies(a) * t);
        return u;
    }

    // rho_I = U^dagger rho U with U = exp(-i H_diag t):  rho_I(a,b) = rho(a,b) e^{i(h_a - h_b) t}
    Matrix to_interaction(const Matrix& rho, double t) const {
        const Vector u = rotation(t);
        return u.asDiagonal() * rho * u.conjugate().asDiagonal();
    }

    Matrix from_interaction(const Matrix& rho_i, double t) const {
        const Vector u = rotation(t);
        return u.conjugate().asDiagonal() * rho_i * u.asDiagonal();
    }

    void operator()(const OdeState& x, OdeState& dxdt, double t) const {
        const int n = gen.dim;
        Eigen::Map<const Matrix> rho(x.data(), n, n);
        Eigen::Map<Matrix> out(dxdt.data(), n, n);
        out.setZero();
        if (gen.drive_amplitude != 0.0) {
            const Vector u = rotation(t);
            Matrix v = u.asDiagonal() * gen.effective_drive * u.conjugate().asDiagonal();
            if (gen.mode == DriveMode::full_time) v *= std::cos(gen.drive_frequency * t);
            out.noalias() = cplx(0.0, -1.0) * (v * rho - rho * v);
        }
        for (int b = 0; b < n; ++b) {
            for (int a = 0; a < n; ++a) out(a, b) -= 0.5 * (gen.decay(a) + gen.decay(b)) * rho(a, b);
        }
        for (int k = 0; k < n; ++k) {
            const cplx pk = rho(k, k);
            for (int j = 0; j < k; ++j) out(j, j) += gen.rates(j, k) * pk;
        }
    }
};

}  // namespace

std::vector<Matrix> evolve_sampled(const LindbladGenerator& generator, const Matrix& rho0, double t0,
                                   std::span<const double> times, const EvolveOptions& options) {
    namespace odeint = boost::numeric::odeint;
    const int n = generator.dim;
    if (rho0.rows() != n || rho0.cols() != n) throw InvalidArgument("evolve: initial state has wrong dimension");
    if (!(options.tolerance > 0.0)) throw InvalidArgument("evolve: tolerance must be > 0");
    if (times.empty()) return {};
    if (!std::is_sorted(times.begin(), times.end()) || times.front() < t0) {
        throw InvalidArgument("evolve: sample times must be ascending and >= t0");
    }

    const InteractionPicture picture{generator};
    std::vector<double> grid;
    grid.reserve(times.size() + 1);
    const bool prepend = times.front() > t0;
    if (prepend) grid.push_back(t0);
    grid.insert(grid.end(), times.begin(), times.end());

    const Matrix start = picture.to_interaction(rho0, t0);
    OdeState x(start.data(), start.data() + start.size());

    std::vector<Matrix> samples;
    samples.reserve(times.size());
    std::size_t seen = 0;
    auto observer = [&](const OdeState& state, double t) {
        if (prepend && seen++ == 0) return;
        Eigen::Map<const Matrix> rho_i(state.data(), n, n);
        samples.push_back(picture.from_interaction(rho_i, t));
    };

    if (grid.size() == 1) {
        samples.push_back(rho0);
        return samples;
    }

    try {
        auto stepper = odeint::make_dense_output(options.tolerance, options.tolerance,
                                                 odeint::runge_kutta_dopri5<OdeState>());
        const double span = grid.back() - grid.front();
        const double dt = std::min(options.initial_step, span > 0.0 ? span : options.initial_step);
        odeint::integrate_times(stepper, picture, x, grid.begin(), grid.end(), dt, observer,
                                odeint::max_step_checker(options.max_steps_without_progress));
    } catch (const odeint::odeint_error& e) {
        std::ostringstream msg;
        msg << "evolve: integration failed between t=" << grid.front() << " and t=" << grid.back() << " ("
            << e.what() << ")";
        throw IntegrationError(msg.str());
    }
    // integrate_times reports coincident times once per entry; duplicates in the request are honored.
    if (samples.size() != times.size()) {
        throw IntegrationError("evolve: integrator produced " + std::to_string(samples.size()) + " samples for " +
                               std::to_string(times.size()) + " requested times");
    }
    return samples;
}

Matrix evolve(const LindbladGenerator& generator, const Matrix& rho0, double t_final, double tolerance) {
    EvolveOptions options;
    options.tolerance = tolerance;
    const double times[] = {t_final};
    return evolve_sampled(generator, rho0, 0.0, times, options).front();
}

DensityState period_averaged_state(const LindbladGenerator& generator, const Matrix& rho0, double t_final,
                                   int samples, const EvolveOptions& options) {
    if (samples < 1) throw InvalidArgument("period_averaged_state: samples must be >= 1");
    if (!(generator.drive_frequency > 0.0)) {
        throw InvalidArgument("period_averaged_state: drive frequency must be > 0");
    }
    const double period = 2.0 * std::numbers::pi / generator.drive_frequency;
    if (t_final < period) throw InvalidArgument("period_averaged_state: t_final shorter than one drive period");
    std::vector<double> times(samples);
    for (int s = 0; s < samples; ++s) times[s] = t_final - period + period * s / samples;
    const auto states = evolve_sampled(generator, rho0, 0.0, times, options);
    DensityState out;
    out.matrix = Matrix::Zero(generator.dim, generator.dim);
    for (const auto& rho : states) out.matrix += rho;
    out.matrix /= static_cast<double>(samples);
    return out;
}

std::optional<double> g2_zero_steady(const Matrix& rho, const PositiveFrequencyOperator& oplus) {
    if (rho.rows() != oplus.dim()) throw InvalidArgument("g2_zero_steady: dimension mismatch");
    const Matrix& op = oplus.matrix;
    const Matrix om = op.adjoint();
    const double single = (om * op * rho).trace().real();
    const double denominator = single * single;
    if (denominator < kDarkDenominator) return std::nullopt;
    return (om * om * op * op * rho).trace().real() / denominator;
}

namespace {

void finish_series(CorrelationSeries& series) {
    for (double& v : series.values) {
        if (v < -1e-8) {
            ++series.clipped_negatives;
            v = 0.0;
        }
    }
}

CorrelationSeries prepare_series(const LindbladGenerator& generator, const DensityState& rho_ss,
                                 const PositiveFrequencyOperator& oplus, std::span<const double> tau_grid) {
    if (oplus.dim() != generator.dim || rho_ss.matrix.rows() != generator.dim) {
        throw InvalidArgument("g2_tau: operator, state and generator dimensions differ");
    }
    if (generator.time_dependent()) {
        throw InvalidArgument("g2_tau: regression needs a time-independent (dressed_rwa) generator");
    }
    if (!std::is_sorted(tau_grid.begin(), tau_grid.end()) || (!tau_grid.empty() && tau_grid.front() < 0.0)) {
        throw InvalidArgument("g2_tau: tau grid must be ascending and nonnegative");
    }
    CorrelationSeries series;
    series.tau_grid.assign(tau_grid.begin(), tau_grid.end());
    series.normalization = (oplus.negative() * oplus.matrix * rho_ss.matrix).trace().real();
    series.defined = series.normalization * series.normalization >= kDarkDenominator;
    series.metadata["derivative_order"] = std::to_string(oplus.derivative_order);
    series.metadata["drive_mode"] = std::string(to_string(generator.mode));
    return series;
}

}  // namespace

CorrelationSeries g2_tau(const LindbladGenerator& generator, const DensityState& rho_ss,
                         const PositiveFrequencyOperator& oplus, std::span<const double> tau_grid,
                         const EvolveOptions& options) {
    CorrelationSeries series = prepare_series(generator, rho_ss, oplus, tau_grid);
    series.metadata["method"] = "regression";
    if (!series.defined || tau_grid.empty()) return series;

    const Matrix& op = oplus.matrix;
    const Matrix om = op.adjoint();
    const Matrix intensity = om * op;
    const Matrix seed = op * rho_ss.matrix * om;
    const double norm2 = series.normalization * series.normalization;

    const auto states = evolve_sampled(generator, seed, 0.0, tau_grid, options);
    series.values.reserve(states.size());
    for (const auto& x : states) series.values.push_back((intensity * x).trace().real() / norm2);
    finish_series(series);
    return series;
}

CorrelationSeries g2_tau_averaged(const LindbladGenerator& generator, const DensityState& rho_ss,
                                  const PositiveFrequencyOperator& oplus, std::span<const double> tau_grid,
                                  double bandwidth) {
    if (!(bandwidth > 0.0)) throw InvalidArgument("g2_tau_averaged: bandwidth must be > 0");
    CorrelationSeries series = prepare_series(generator, rho_ss, oplus, tau_grid);
    series.metadata["method"] = "eigenmode_average";
    std::ostringstream bw;
    bw << bandwidth;
    series.metadata["bandwidth"] = bw.str();
    if (!series.defined || tau_grid.empty()) return series;

    const int n = generator.dim;
    const Matrix& op = oplus.matrix;
    const Matrix om = op.adjoint();
    const Matrix seed = op * rho_ss.matrix * om;
    const Matrix intensity = om * op;

    Eigen::ComplexEigenSolver<Matrix> solver(generator.superoperator);
    if (solver.info() != Eigen::Success) throw NumericalError("g2_tau_averaged: Liouvillian eigensolver failed");
    const Vector& modes = solver.eigenvalues();
    const Matrix& right = solver.eigenvectors();
    Eigen::PartialPivLU<Matrix> lu(right);
    const Vector coeffs = lu.solve(Eigen::Map<const Vector>(seed.data(), seed.size()));

    // Tr(M X) = sum_ab M(b, a) X(a, b) = vec(M^T) . vec(X)
    const Matrix mt = intensity.transpose();
    const Eigen::Map<const Vector> readout(mt.data(), mt.size());
    const Vector weights = (readout.transpose() * right).transpose().cwiseProduct(coeffs);

    const double norm2 = series.normalization * series.normalization;
    series.values.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        cplx total = 0.0;
        for (Eigen::Index k = 0; k < modes.size(); ++k) {
            if (std::abs(modes(k).imag()) <= bandwidth) total += weights(k) * std::exp(modes(k) * tau);
        }
        series.values.push_back(total.real() / norm2);
    }
    (void)n;
    finish_series(series);
    return series;
}

DrivenPoint solve_driven_point(const DressedBasis& basis, const SystemParams& p, const LindbladOptions& options) {
    DrivenPoint point{basis, p, {}, {}, {}};
    const int ground = basis.index_of(JcLabel::ground());
    const int upper = basis.index_of(JcLabel::plus(1));
    if (upper >= options.n_levels) {
        throw InvalidArgument("state 1+ lies outside the kept n_levels = " + std::to_string(options.n_levels));
    }
    if (!(point.params.drive_frequency > 0.0)) {
        point.params.drive_frequency = basis.energies(upper) - basis.energies(ground);
    }
    point.generator = build_liouvillian(basis, point.params, options);
    point.steady = steady_state(point.generator);
    const auto bare = build_emission_operator(point.params, EmissionKind::i_theta);
    point.emission = positive_frequency(bare, basis, 1).truncated(options.n_levels);
    return point;
}

std::vector<DriveSweepRow> sweep_g2_drive(const SystemParams& templ, std::span<const double> epsilon_grid,
                                          const LindbladOptions& options, const LabelingOptions& labeling,
                                          unsigned threads) {
    const auto bases = sweep_labeled(templ, SweepAxis::epsilon, epsilon_grid, labeling);
    std::vector<DriveSweepRow> rows(bases.size());
    parallel_for(bases.size(), threads, [&](std::size_t i) {
        SystemParams p = bases[i].params;
        p.drive_frequency = 0.0;  // retune to the 0 <-> 1+ transition
        const DrivenPoint point = solve_driven_point(bases[i], p, options);
        rows[i].epsilon = epsilon_grid[i];
        rows[i].omega_d = point.params.drive_frequency;
        rows[i].pop_1plus = point.steady.population(bases[i].index_of(JcLabel::plus(1)));
        rows[i].g2_zero = g2_zero_steady(point.steady.matrix, point.emission);
    });
    return rows;
}

}  // namespace usc
