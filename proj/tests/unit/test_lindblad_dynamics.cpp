#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"
#include "usc/errors.hpp"
#include "usc/lindblad_dynamics.hpp"

using namespace usc;

namespace {

SystemParams driven_params(double epsilon) {
    SystemParams p;
    p.delta = 0.5;
    p.lambda = 0.2;
    p.epsilon = epsilon;
    p.kappa = 5e-4;
    p.gamma = 5e-4;
    p.drive_amplitude = 0.25 * 5e-4;
    p.n_max = 16;
    return p;
}

Matrix vec_to_mat(const Vector& v, int n) { return Eigen::Map<const Matrix>(v.data(), n, n); }
Vector mat_to_vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

}  // namespace

TEST_CASE("enum text round-trips") {
    CHECK(parse_drive_mode(to_string(DriveMode::full_time)) == DriveMode::full_time);
    CHECK(parse_spectral_weight(to_string(SpectralWeight::flat)) == SpectralWeight::flat);
    CHECK(parse_qubit_bath(to_string(QubitBath::sigma_x)) == QubitBath::sigma_x);
    CHECK_THROWS_AS(parse_drive_mode("rwa"), InvalidArgument);
    CHECK_THROWS_AS(parse_spectral_weight("1/f"), InvalidArgument);
}

TEST_CASE("rates follow the dressed matrix elements") {
    const auto p = driven_params(0.2);
    const auto basis = diagonalize_labeled(p);
    for (auto weight : {SpectralWeight::ohmic, SpectralWeight::flat}) {
        LindbladOptions opts;
        opts.spectral_weight = weight;
        const auto gen = build_liouvillian(basis, p, opts);
        // independent matrix elements from the oracle spectrum
        const oracle::Model m{1.0, 0.5, 0.2, 0.2, false, 16};
        const auto eig = oracle::spectrum(oracle::hamiltonian(m));
        const Matrix x = build_drive_operator(p).entries();
        const Matrix it = build_emission_operator(p, EmissionKind::i_theta).entries();
        for (int k = 1; k < 6; ++k) {
            for (int j = 0; j < k; ++j) {
                const double w = eig.energies[k] - eig.energies[j];
                const double xe = std::norm(eig.vectors.col(j).dot(x * eig.vectors.col(k)));
                const double ie = std::norm(eig.vectors.col(j).dot(it * eig.vectors.col(k)));
                const double wc = weight == SpectralWeight::ohmic ? w : 1.0;
                const double wq = weight == SpectralWeight::ohmic ? w / p.omega_a() : 1.0;
                const double expect = p.kappa * wc * xe + p.gamma * wq * ie;
                CHECK(gen.rates(j, k) == doctest::Approx(expect).epsilon(1e-8));
            }
        }
        CHECK((gen.rates.array() >= 0.0).all());
        for (const auto& t : gen.jump_terms) {
            CHECK(t.rate > 0.0);
            CHECK(t.lower < t.upper);
        }
    }
}

TEST_CASE("driven two-level steady state matches the analytic solution") {
    // Keep only 0 and 1-: resonant drive Omega = A |X_01|, decay Gamma:
    // rho_11 = (Omega^2 / 4) / (Gamma^2 / 4 + Omega^2 / 2)
    SystemParams p = driven_params(0.0);
    p.drive_amplitude = 3e-4;
    const auto basis = diagonalize_labeled(p);
    p.drive_frequency = basis.energies(1) - basis.energies(0);
    LindbladOptions opts;
    opts.n_levels = 2;
    const auto gen = build_liouvillian(basis, p, opts);
    const double x01 = std::abs(basis.to_dressed(build_drive_operator(p))(0, 1));
    const double omega = p.drive_amplitude * x01;
    const double gamma = gen.rates(0, 1);
    const auto ss = steady_state(gen);
    const double expect = 0.25 * omega * omega / (0.25 * gamma * gamma + 0.5 * omega * omega);
    CHECK(ss.population(1) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(ss.trace() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("generator invariants") {
    std::mt19937 rng(11);
    for (auto mode : {DriveMode::dressed_rwa, DriveMode::full_time}) {
        for (double eps : {0.0, 0.35}) {
            CAPTURE(eps);
            auto p = driven_params(eps);
            const auto basis = diagonalize_labeled(p);
            p.drive_frequency = basis.energy_of(JcLabel::plus(1)) - basis.energy_of(JcLabel::ground());
            LindbladOptions opts;
            opts.drive_mode = mode;
            const auto gen = build_liouvillian(basis, p, opts);
            const int n = gen.dim;
            for (double t : {0.0, 1.3, 17.0}) {
                const Matrix rho = oracle::random_density(n, rng);
                const Matrix lr = gen.apply(rho, t);
                CHECK(std::abs(lr.trace()) <= 1e-10 * rho.norm());
                const Matrix viaSuper = vec_to_mat(gen.superoperator_at(t) * mat_to_vec(rho), n);
                CHECK((viaSuper - lr).cwiseAbs().maxCoeff() < 1e-14);
                CHECK((lr - lr.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
            }
            if (mode == DriveMode::dressed_rwa) {
                Eigen::ComplexEigenSolver<Matrix> solver(gen.superoperator, false);
                CHECK(solver.eigenvalues().real().maxCoeff() <= 1e-10);
            }
        }
    }
}

TEST_CASE("dressed_rwa steady state") {
    auto p = driven_params(0.35);
    const auto point = solve_driven_point(diagonalize_labeled(p), p, {});
    const auto& ss = point.steady;
    const Matrix residual = point.generator.apply(ss.matrix);
    CHECK(residual.norm() <= 1e-9 * point.generator.superoperator.norm());
    CHECK(ss.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ss.hermiticity_error() < 1e-14);
    CHECK(ss.min_eigenvalue() > -1e-10);
    CHECK(point.params.drive_frequency ==
          doctest::Approx(point.basis.energy_of(JcLabel::plus(1)) - point.basis.energy_of(JcLabel::ground())));
    CHECK(point.emission.dim() == 12);
}

TEST_CASE("steady state refuses degenerate or time-dependent generators") {
    auto p = driven_params(0.1);
    const auto basis = diagonalize_labeled(p);
    p.kappa = 0.0;
    p.gamma = 0.0;
    p.drive_amplitude = 0.0;
    CHECK_THROWS_AS(steady_state(build_liouvillian(basis, p, {})), DegenerateKernelError);
    p = driven_params(0.1);
    p.drive_frequency = 1.0;
    LindbladOptions opts;
    opts.drive_mode = DriveMode::full_time;
    CHECK_THROWS_AS(steady_state(build_liouvillian(basis, p, opts)), InvalidArgument);
    opts.n_levels = 100;
    CHECK_THROWS_AS(build_liouvillian(basis, p, opts), InvalidArgument);
}

TEST_CASE("undriven relaxation: populations obey the rate equation") {
    auto p = driven_params(0.2);
    p.drive_amplitude = 0.0;
    const auto basis = diagonalize_labeled(p);
    const auto gen = build_liouvillian(basis, p, {});
    const int n = gen.dim;
    std::mt19937 rng(5);
    const Matrix rho0 = oracle::random_density(n, rng);
    const double t = 1500.0;
    const Matrix rho = evolve(gen, rho0, t, 1e-10);

    Eigen::MatrixXd rate_eq = gen.rates;
    rate_eq.diagonal() -= gen.decay;
    const Eigen::VectorXd p0 = rho0.diagonal().real();
    const Eigen::VectorXd pt = (rate_eq * t).exp() * p0;
    for (int k = 0; k < n; ++k) CHECK(std::abs(rho(k, k).real() - pt(k)) < 1e-8);

    // coherences rotate and decay independently
    for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 5; ++b) {
            const cplx expect = rho0(a, b) * std::exp(cplx(-0.5 * (gen.decay(a) + gen.decay(b)) * t,
                                                           -(gen.frame_energies(a) - gen.frame_energies(b)) * t));
            CHECK(std::abs(rho(a, b) - expect) < 1e-8);
        }
    }
}

TEST_CASE("undriven relaxation reaches the dressed ground state") {
    std::mt19937 rng(2);
    for (double eps : {0.0, 0.2}) {
        CAPTURE(eps);
        auto p = driven_params(eps);
        p.drive_amplitude = 0.0;
        const auto gen = build_liouvillian(diagonalize_labeled(p), p, {});
        const Matrix rho = evolve(gen, oracle::random_density(gen.dim, rng), 20.0 / p.gamma, 1e-10);
        CHECK(rho(0, 0).real() >= 1.0 - 1e-6);
    }
    // at larger bias the 1- level decays slower than gamma, so time is measured in its lifetime
    auto p = driven_params(0.35);
    p.drive_amplitude = 0.0;
    const auto gen = build_liouvillian(diagonalize_labeled(p), p, {});
    const double slowest = gen.decay.tail(gen.dim - 1).minCoeff();
    CHECK(slowest < 0.69 * p.gamma);
    const Matrix rho = evolve(gen, oracle::random_density(gen.dim, rng), 20.0 / slowest, 1e-10);
    CHECK(rho(0, 0).real() >= 1.0 - 1e-6);
}

TEST_CASE("evolve agrees with the superoperator exponential") {
    for (auto mode : {DriveMode::dressed_rwa}) {
        auto p = driven_params(0.35);
        p.drive_amplitude = 2e-3;  // stronger drive so the coherent part matters over a short run
        const auto basis = diagonalize_labeled(p);
        LindbladOptions opts;
        opts.drive_mode = mode;
        opts.n_levels = 8;
        p.drive_frequency = basis.energy_of(JcLabel::plus(1)) - basis.energy_of(JcLabel::ground());
        const auto gen = build_liouvillian(basis, p, opts);
        std::mt19937 rng(4);
        const Matrix rho0 = oracle::random_density(gen.dim, rng);
        const std::vector<double> times = {10.0, 250.0, 2000.0};
        const auto states = evolve_sampled(gen, rho0, 0.0, times);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const Matrix exact = vec_to_mat((gen.superoperator * times[i]).exp() * mat_to_vec(rho0), gen.dim);
            CHECK((states[i] - exact).cwiseAbs().maxCoeff() < 1e-7);
            CHECK(std::abs(states[i].trace() - 1.0) < 1e-8);
            CHECK((states[i] - states[i].adjoint()).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("full_time integration stays hermitian and trace preserving") {
    auto p = driven_params(0.35);
    p.drive_amplitude = 2e-3;
    const auto basis = diagonalize_labeled(p);
    p.drive_frequency = basis.energy_of(JcLabel::plus(1)) - basis.energy_of(JcLabel::ground());
    LindbladOptions opts;
    opts.drive_mode = DriveMode::full_time;
    opts.n_levels = 6;
    const auto gen = build_liouvillian(basis, p, opts);
    CHECK(gen.time_dependent());
    Matrix rho0 = Matrix::Zero(gen.dim, gen.dim);
    rho0(0, 0) = 1.0;
    const std::vector<double> times = {50.0, 300.0};
    for (const auto& rho : evolve_sampled(gen, rho0, 0.0, times)) {
        CHECK(std::abs(rho.trace() - 1.0) < 1e-8);
        CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("evolve argument checks and integrator failure") {
    auto p = driven_params(0.0);
    const auto gen = build_liouvillian(diagonalize_labeled(p), p, {});
    Matrix rho0 = Matrix::Zero(gen.dim, gen.dim);
    rho0(0, 0) = 1.0;
    const std::vector<double> backwards = {5.0, 1.0};
    CHECK_THROWS_AS(evolve_sampled(gen, rho0, 0.0, backwards), InvalidArgument);
    CHECK_THROWS_AS(evolve_sampled(gen, Matrix::Identity(3, 3), 0.0, std::vector<double>{1.0}), InvalidArgument);
    EvolveOptions tight;
    tight.max_steps_without_progress = 2;
    tight.initial_step = 1e-3;
    CHECK_THROWS_AS(evolve_sampled(gen, rho0, 0.0, std::vector<double>{1e5}, tight), IntegrationError);
    const auto same = evolve_sampled(gen, rho0, 0.0, std::vector<double>{0.0});
    CHECK((same.front() - rho0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("resonant drive ladder") {
    RealVector e(4);
    e << 0.0, 1.0, 2.02, 5.0;
    Matrix x = Matrix::Ones(4, 4);
    const auto frame = resonant_drive_frame(e, x, 1.0, 0.05);
    CHECK(frame.quanta == std::vector<int>{0, 1, 2, 5});
    CHECK(frame.resonant_pairs.size() == 2);
    CHECK(frame.dropped == 0);
    x(1, 2) = x(2, 1) = 0.0;  // forbidden transition breaks the ladder; level 2 is seeded from its energy
    const auto broken = resonant_drive_frame(e, x, 1.0, 0.05);
    CHECK(broken.quanta == std::vector<int>{0, 1, 2, 5});
    CHECK(broken.resonant_pairs.size() == 1);
}

TEST_CASE("regression g2 at zero delay equals the steady-state ratio") {
    for (double eps : {0.0, 0.2, 0.35}) {
        for (auto weight : {SpectralWeight::ohmic, SpectralWeight::flat}) {
            CAPTURE(eps);
            auto p = driven_params(eps);
            LindbladOptions opts;
            opts.spectral_weight = weight;
            const auto pt = solve_driven_point(diagonalize_labeled(p), p, opts);
            const double direct = *g2_zero_steady(pt.steady.matrix, pt.emission);
            const std::vector<double> tau = {0.0};
            const auto raw = g2_tau(pt.generator, pt.steady, pt.emission, tau);
            CHECK(std::abs(raw.values[0] - direct) <= 1e-6 * direct);
        }
    }
}

TEST_CASE("beat-averaged series matches a windowed average of the raw series") {
    auto p = driven_params(0.35);
    LindbladOptions opts;
    opts.spectral_weight = SpectralWeight::flat;
    const auto pt = solve_driven_point(diagonalize_labeled(p), p, opts);
    const double center = 1.0 / p.gamma;
    const double half = 300.0;
    std::vector<double> window;
    for (double t = center - half; t <= center + half + 1e-9; t += 0.25) window.push_back(t);
    const auto raw = g2_tau(pt.generator, pt.steady, pt.emission, window);
    double mean = 0.0;
    for (double v : raw.values) mean += v;
    mean /= static_cast<double>(raw.values.size());
    const std::vector<double> at = {center};
    const auto avg = g2_tau_averaged(pt.generator, pt.steady, pt.emission, at);
    CHECK(avg.values[0] == doctest::Approx(mean).epsilon(2e-2));
    // the raw series swings around its average
    const auto [lo, hi] = std::minmax_element(raw.values.begin(), raw.values.end());
    CHECK(*hi - *lo > 0.05);
    CHECK_THROWS_AS(g2_tau_averaged(pt.generator, pt.steady, pt.emission, at, 0.0), InvalidArgument);
}

TEST_CASE("g2(tau) relaxes to 1 and undefined emission is flagged") {
    auto p = driven_params(0.0);
    const auto pt = solve_driven_point(diagonalize_labeled(p), p, {});
    const std::vector<double> tau = {0.0, 8.0 / p.gamma, 12.0 / p.gamma};
    const auto avg = g2_tau_averaged(pt.generator, pt.steady, pt.emission, tau);
    CHECK(avg.defined);
    CHECK(avg.values[2] == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(avg.clipped_negatives == 0);

    PositiveFrequencyOperator dark = pt.emission;
    dark.matrix.setZero();
    const auto none = g2_tau(pt.generator, pt.steady, dark, tau);
    CHECK_FALSE(none.defined);
    CHECK(none.values.empty());
    CHECK(g2_zero_steady(pt.steady.matrix, dark) == std::nullopt);
}

TEST_CASE("drive sweep rows") {
    const auto p = driven_params(0.0);
    const std::vector<double> grid = {0.0, 0.1, 0.35};
    const auto rows1 = sweep_g2_drive(p, grid, {}, {}, 1);
    const auto rows2 = sweep_g2_drive(p, grid, {}, {}, 2);
    REQUIRE(rows1.size() == 3);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(rows1[i].epsilon == grid[i]);
        CHECK(*rows1[i].g2_zero == *rows2[i].g2_zero);
        CHECK(rows1[i].pop_1plus > 0.0);
    }
    CHECK(*rows1[0].g2_zero < 0.1);
    CHECK(*rows1[2].g2_zero > 1.0);
}
