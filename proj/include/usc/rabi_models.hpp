// rabi_models.hpp — generalized quantum Rabi Hamiltonians, drive and emission operators
//
// All frequencies are in units of the cavity frequency omega_c. The qubit term is
// +omega_a/2 sigma_z with |e> the +1 eigenstate of sigma_z, and the light-matter
// coupling is lambda (a + a^dagger)(cos(theta) sigma_x + sin(theta) sigma_z), where the
// flux-qubit mixing angle follows sin(theta) = epsilon / omega_a and
// omega_a = sqrt(delta^2 + epsilon^2).

#pragma once

#include <string_view>

#include "usc/operator_algebra.hpp"

namespace usc {

inline constexpr int kMinFockCutoff = 3;

struct SystemParams {
    double omega_c = 1.0;
    double delta = 1.0;     // zero-bias qubit gap
    double epsilon = 0.0;   // flux bias
    double lambda = 0.0;    // light-matter coupling
    bool diamagnetic = false;
    int n_max = 20;
    double kappa = 0.0;
    double gamma = 0.0;
    double drive_amplitude = 0.0;
    double drive_frequency = 0.0;

    double omega_a() const;
    double sin_theta() const;
    double cos_theta() const;
    // D = lambda^2 / omega_a when the diamagnetic term is enabled, 0 otherwise.
    double diamagnetic_strength() const;
    int dim() const { return 2 * (n_max + 1); }

    // Throws InvalidArgument naming the offending field.
    void validate() const;
};

enum class EmissionKind { sigma_x, i_theta };

std::string_view to_string(EmissionKind kind);
EmissionKind parse_emission_kind(std::string_view text);

OperatorMatrix build_hamiltonian(const SystemParams& p);

// (a + a^dagger) on the composite space. Amplitude and frequency stay in the params.
OperatorMatrix build_drive_operator(const SystemParams& p);

// Bare-basis observable whose positive-frequency part is detected: sigma_x or
// I_theta = cos(theta) sigma_x + sin(theta) sigma_z (the flux-qubit current up to I_a).
OperatorMatrix build_emission_operator(const SystemParams& p, EmissionKind kind);

// Pi = -sigma_z (x) (-1)^{a^dagger a}; +1 on the bare ground state |g,0>.
OperatorMatrix parity_operator(int n_max);

}  // namespace usc
