// lindblad_dynamics.hpp — dressed-picture master equation with a coherent cavity drive
//
// Dissipation acts through jump operators |j><k| between dressed states (omega_k > omega_j),
// one per transition and bath, at zero temperature:
//   cavity: kappa * w(omega_kj / omega_c) * |<j|(a + a^dagger)|k>|^2
//   qubit:  gamma * w(omega_kj / omega_a) * |<j|I_theta|k>|^2
// with w(x) = x (ohmic) or w(x) = 1 (flat). Density matrices are vectorized by column
// stacking: vec(rho)[a + b * n] = rho(a, b).

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "usc/dressed_spectrum.hpp"

namespace usc {

enum class DriveMode { dressed_rwa, full_time };
enum class SpectralWeight { ohmic, flat };
enum class QubitBath { i_theta, sigma_x };
enum class BathChannel { cavity, qubit };

std::string_view to_string(DriveMode mode);
std::string_view to_string(SpectralWeight weight);
std::string_view to_string(QubitBath bath);
std::string_view to_string(BathChannel channel);
DriveMode parse_drive_mode(std::string_view text);
SpectralWeight parse_spectral_weight(std::string_view text);
QubitBath parse_qubit_bath(std::string_view text);

struct LindbladOptions {
    int n_levels = 12;
    DriveMode drive_mode = DriveMode::dressed_rwa;
    SpectralWeight spectral_weight = SpectralWeight::ohmic;
    QubitBath qubit_bath = QubitBath::i_theta;
    double resonance_cut = 0.05;  // dressed_rwa keeps drive elements with |omega_kj - omega_d| <= cut
};

struct JumpTerm {
    double rate = 0.0;
    int lower = 0;  // j
    int upper = 0;  // k
    BathChannel channel = BathChannel::cavity;
};

struct LindbladGenerator {
    int dim = 0;
    DriveMode mode = DriveMode::dressed_rwa;
    double drive_frequency = 0.0;
    double drive_amplitude = 0.0;
    RealVector energies;             // dressed energies of the kept levels
    std::vector<int> drive_quanta;   // rotating-frame photon number per level (dressed_rwa)
    RealVector frame_energies;       // diagonal of the coherent Hamiltonian
    // Off-diagonal coherent part. dressed_rwa: retained drive elements A X_jk / 2 (static).
    // full_time: A X, multiplied by cos(omega_d t).
    Matrix effective_drive;
    std::vector<JumpTerm> jump_terms;
    Eigen::MatrixXd rates;           // rates(j, k): total transfer rate k -> j
    RealVector decay;                // decay(k) = sum_j rates(j, k)
    int dropped_drive_elements = 0;  // resonant elements inconsistent with the drive-quanta ladder
    Matrix superoperator;            // static part, n^2 x n^2
    Matrix drive_superoperator;      // full_time only: -i[A X, .]; scaled by cos(omega_d t)

    bool time_dependent() const { return mode == DriveMode::full_time && drive_amplitude != 0.0; }
    Matrix coherent_hamiltonian(double t = 0.0) const;
    // L[rho] at time t (t only matters in full_time mode).
    Matrix apply(const Eigen::Ref<const Matrix>& rho, double t = 0.0) const;
    Matrix superoperator_at(double t) const;
};

LindbladGenerator build_liouvillian(const DressedBasis& basis, const SystemParams& p,
                                    const LindbladOptions& options = {});

// Drive quanta ladder and retained elements for a given set of levels (dressed_rwa).
struct DriveFrame {
    std::vector<int> quanta;
    std::vector<std::pair<int, int>> resonant_pairs;  // (j, k), j < k
    int dropped = 0;
};
DriveFrame resonant_drive_frame(const RealVector& energies, const Matrix& drive_elements, double drive_frequency,
                                double resonance_cut);

struct DensityState {
    Matrix matrix;

    double trace() const { return matrix.trace().real(); }
    double population(int level) const { return matrix(level, level).real(); }
    double min_eigenvalue() const;
    double hermiticity_error() const;
};

// Unique kernel of L normalized to unit trace (one row of the system replaced by the
// trace constraint). Throws DegenerateKernelError when the kernel is not one-dimensional.
DensityState steady_state(const LindbladGenerator& generator);

struct EvolveOptions {
    double tolerance = 1e-9;   // absolute and relative per-step error
    double initial_step = 0.1;
    int max_steps_without_progress = 500000;
};

// Samples of rho(t) at the requested times (ascending, >= t0), integrating
// d rho / dt = L[rho] from rho(t0) = rho0 with an adaptive Dormand-Prince scheme.
// rho0 need not be hermitian (regression seeds are not).
std::vector<Matrix> evolve_sampled(const LindbladGenerator& generator, const Matrix& rho0, double t0,
                                   std::span<const double> times, const EvolveOptions& options = {});

Matrix evolve(const LindbladGenerator& generator, const Matrix& rho0, double t_final, double tolerance);

// Average of rho(t) over the last drive period before t_final (full_time mode).
DensityState period_averaged_state(const LindbladGenerator& generator, const Matrix& rho0, double t_final,
                                   int samples = 64, const EvolveOptions& options = {});

struct CorrelationSeries {
    std::vector<double> tau_grid;
    std::vector<double> values;
    double normalization = 0.0;  // <O- O+> in the steady state
    bool defined = true;
    int clipped_negatives = 0;   // values below -1e-8 that were reported as 0
    std::map<std::string, std::string> metadata;
};

// Zero-delay ratio <O- O- O+ O+> / <O- O+>^2 in state rho; empty when the squared
// denominator is below kDarkDenominator.
std::optional<double> g2_zero_steady(const Matrix& rho, const PositiveFrequencyOperator& oplus);

// Quantum-regression g2(tau): Tr[O- O+ e^{L tau}(O+ rho O-)] / Tr[O- O+ rho]^2, propagated with evolve.
CorrelationSeries g2_tau(const LindbladGenerator& generator, const DensityState& rho_ss,
                         const PositiveFrequencyOperator& oplus, std::span<const double> tau_grid,
                         const EvolveOptions& options = {});

// Same correlator keeping only Liouvillian eigenmodes with |Im lambda| <= bandwidth:
// the curve seen by a detector that cannot resolve beats between emission lines
// separated by more than `bandwidth`.
CorrelationSeries g2_tau_averaged(const LindbladGenerator& generator, const DensityState& rho_ss,
                                  const PositiveFrequencyOperator& oplus, std::span<const double> tau_grid,
                                  double bandwidth = 1e-2);

struct DriveSweepRow {
    double epsilon = 0.0;
    std::optional<double> g2_zero;
    double pop_1plus = 0.0;
    double omega_d = 0.0;
};

// g2_{dI_theta}(0) and P_{1+} versus flux bias, with the drive retuned at every point to
// the |0> <-> |1+> transition.
std::vector<DriveSweepRow> sweep_g2_drive(const SystemParams& templ, std::span<const double> epsilon_grid,
                                          const LindbladOptions& options = {}, const LabelingOptions& labeling = {},
                                          unsigned threads = 1);

// The pieces of one driven steady-state evaluation, reused by the CLI and tests.
struct DrivenPoint {
    DressedBasis basis;
    SystemParams params;  // with drive_frequency resolved
    LindbladGenerator generator;
    DensityState steady;
    PositiveFrequencyOperator emission;  // order-1 I_theta, truncated to the kept levels
};

DrivenPoint solve_driven_point(const DressedBasis& basis, const SystemParams& p, const LindbladOptions& options);

}  // namespace usc
