#include "usc/rabi_models.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "usc/errors.hpp"

namespace usc {

double SystemParams::omega_a() const {
    return std::hypot(delta, epsilon);
}

double SystemParams::sin_theta() const {
    const double wa = omega_a();
    if (wa <= 0.0) throw InvalidArgument("omega_a = 0: mixing angle undefined (delta = epsilon = 0)");
    return epsilon / wa;
}

double SystemParams::cos_theta() const {
    const double wa = omega_a();
    if (wa <= 0.0) throw InvalidArgument("omega_a = 0: mixing angle undefined (delta = epsilon = 0)");
    return delta / wa;
}

double SystemParams::diamagnetic_strength() const {
    if (!diamagnetic) return 0.0;
    return lambda * lambda / omega_a();
}

void SystemParams::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw InvalidArgument("SystemParams." + field + ": " + why);
    };
    auto finite = [&](const char* name, double v) {
        if (!std::isfinite(v)) fail(name, "must be finite");
    };
    finite("omega_c", omega_c);
    finite("delta", delta);
    finite("epsilon", epsilon);
    finite("lambda", lambda);
    finite("kappa", kappa);
    finite("gamma", gamma);
    finite("drive_amplitude", drive_amplitude);
    finite("drive_frequency", drive_frequency);
    if (omega_c <= 0.0) fail("omega_c", "must be > 0");
    if (delta < 0.0) fail("delta", "must be >= 0");
    if (lambda < 0.0) fail("lambda", "must be >= 0");
    if (n_max < kMinFockCutoff) fail("n_max", "must be >= " + std::to_string(kMinFockCutoff));
    if (kappa < 0.0) fail("kappa", "must be >= 0");
    if (gamma < 0.0) fail("gamma", "must be >= 0");
    if (drive_amplitude < 0.0) fail("drive_amplitude", "must be >= 0");
    if (drive_frequency < 0.0) fail("drive_frequency", "must be >= 0");
    if (omega_a() <= 0.0) fail("delta", "omega_a = sqrt(delta^2 + epsilon^2) must be > 0");
}

std::string_view to_string(EmissionKind kind) {
    switch (kind) {
        case EmissionKind::sigma_x: return "sigma_x";
        case EmissionKind::i_theta: return "i_theta";
    }
    return "unknown";
}

EmissionKind parse_emission_kind(std::string_view text) {
    if (text == "sigma_x") return EmissionKind::sigma_x;
    if (text == "i_theta") return EmissionKind::i_theta;
    throw InvalidArgument("unknown emission operator '" + std::string(text) + "' (expected sigma_x or i_theta)");
}

namespace {

OperatorMatrix coupling_quadrature(int n_max) {
    const auto a = fock_annihilation(n_max);
    return a + a.adjoint();
}

OperatorMatrix i_theta_qubit(const SystemParams& p) {
    return p.cos_theta() * pauli_x() + p.sin_theta() * pauli_z();
}

}  // namespace

OperatorMatrix build_hamiltonian(const SystemParams& p) {
    p.validate();
    const auto qid = qubit_identity();
    const auto fid = fock_identity(p.n_max);
    const auto x = coupling_quadrature(p.n_max);

    auto h = (0.5 * p.omega_a()) * tensor(pauli_z(), fid) + p.omega_c * tensor(qid, fock_number(p.n_max)) +
             p.lambda * tensor(i_theta_qubit(p), x);
    if (p.diamagnetic) {
        h = h + p.diamagnetic_strength() * tensor(qid, x * x);
    }
    return h;
}

OperatorMatrix build_drive_operator(const SystemParams& p) {
    p.validate();
    return tensor(qubit_identity(), coupling_quadrature(p.n_max));
}

OperatorMatrix build_emission_operator(const SystemParams& p, EmissionKind kind) {
    p.validate();
    const auto fid = fock_identity(p.n_max);
    switch (kind) {
        case EmissionKind::sigma_x: return tensor(pauli_x(), fid);
        case EmissionKind::i_theta: return tensor(i_theta_qubit(p), fid);
    }
    throw InvalidArgument("build_emission_operator: unknown kind");
}

OperatorMatrix parity_operator(int n_max) {
    Matrix photon = Matrix::Zero(n_max + 1, n_max + 1);
    for (int n = 0; n <= n_max; ++n) photon(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    return -1.0 * tensor(pauli_z(), OperatorMatrix(std::move(photon), SpaceTag::fock));
}

}  // namespace usc
