#include "dlrk/simplified.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "dlrk/kron_solve.hpp"
#include "dlrk/linalg.hpp"

namespace dlrk {

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    Eigen::VectorXd out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

void validate_spectrum(const Eigen::VectorXd& values, const char* name) {
    if (values.size() < 1)
        throw ConfigError(std::string(name) + ": spectrum must be non-empty");
    if (values(0) == 0.0)
        throw ConfigError(std::string(name) + ": dominant eigenvalue must be nonzero");
    for (Eigen::Index i = 1; i < values.size(); ++i) {
        if (std::abs(values(i)) > std::abs(values(i - 1)))
            throw ConfigError(std::string(name) + ": eigenvalues must be ordered by "
                                                  "descending magnitude");
    }
    if (values.size() > 1 && std::abs(values(1)) == std::abs(values(0)))
        throw ConfigError(std::string(name) + ": dominant eigenvalue not simple");
}

/// Well-conditioned seeded square matrix (identity plus a small perturbation).
Eigen::MatrixXd seeded_similarity(Eigen::Index size, std::mt19937_64& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(size, size) +
                            0.5 / std::sqrt(double(size)) * random_normal(size, size, rng);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) > 0.0 && sv(0) / sv(sv.size() - 1) < 50.0) return m;
    }
    throw SolverError("construct_from_spectra: failed to draw a well-conditioned "
                      "similarity transform");
}

}  // namespace

TwoSidedProblem construct_from_spectra(const std::vector<double>& lambdas,
                                       const std::vector<double>& sigmas, std::uint64_t seed,
                                       const SpectraOptions& options) {
    TwoSidedProblem p;
    p.known_lambda = to_vector(lambdas);
    p.known_sigma = to_vector(sigmas);
    validate_spectrum(p.known_lambda, "lambdas");
    validate_spectrum(p.known_sigma, "sigmas");

    const Eigen::Index n = p.known_lambda.size();
    const Eigen::Index m = p.known_sigma.size();
    std::mt19937_64 rng(seed);

    p.v_basis = options.identity_similarity ? Eigen::MatrixXd::Identity(n, n)
                                            : seeded_similarity(n, rng);
    for (Eigen::Index i = 0; i < n; ++i) p.v_basis.col(i).normalize();
    p.u_rows = options.identity_similarity ? Eigen::MatrixXd::Identity(m, m)
                                           : seeded_similarity(m, rng);
    for (Eigen::Index i = 0; i < m; ++i) p.u_rows.row(i).normalize();

    p.c_hat = p.v_basis * p.known_lambda.asDiagonal() *
              p.v_basis.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
    p.d_hat = p.u_rows.partialPivLu().solve(p.known_sigma.asDiagonal() * p.u_rows);

    p.a = Eigen::MatrixXd::Identity(n, n);
    p.b = Eigen::MatrixXd::Identity(m, m);
    p.c = p.c_hat;
    p.d = p.d_hat;
    p.v1 = p.v_basis.col(0);
    p.u1 = p.u_rows.row(0).transpose();

    const double residual = (p.c_hat * p.v1 - p.known_lambda(0) * p.v1).norm();
    if (residual > 1e-12 * std::abs(p.known_lambda(0)) * 100.0)
        throw SolverError("construct_from_spectra: dominant eigenpair residual " +
                          std::to_string(residual));
    return p;
}

TwoSidedResult full_two_sided_iteration(const TwoSidedProblem& problem, double eps,
                                        int max_iter, const Eigen::MatrixXd* init) {
    if (!(eps > 0.0))
        throw ConfigError("full_two_sided_iteration: eps must be positive");
    Eigen::MatrixXd phi = init ? *init : Eigen::MatrixXd::Ones(problem.n(), problem.m());
    if (phi.rows() != problem.n() || phi.cols() != problem.m() || phi.norm() == 0.0)
        throw ConfigError("full_two_sided_iteration: bad initial iterate");
    phi /= phi.norm();

    const double target = problem.dominant_product();
    TwoSidedResult result;
    double k = 1.0;
    for (int n = 0; n < max_iter; ++n) {
        const auto start = std::chrono::steady_clock::now();
        const Eigen::MatrixXd update = problem.c_hat * phi * problem.d_hat;
        const double k_next = update.norm();
        if (k_next == 0.0)
            throw DegenerateProblemError("full_two_sided_iteration: iterate vanished");
        phi = update / k_next;
        const double delta = std::abs(k_next - k);
        k = k_next;
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.history.record(k, delta, static_cast<int>(std::min(problem.n(), problem.m())),
                              seconds);
        result.k_errors.push_back(std::abs(k - target));
        if (delta <= eps) {
            result.history.converged = true;
            break;
        }
    }
    if (!result.history.converged)
        throw NonConvergenceError("full_two_sided_iteration: no convergence after " +
                                      std::to_string(max_iter) + " iterations",
                                  result.history, k);
    result.k = k;
    result.phi = phi;
    return result;
}

LowRankState make_two_sided_init(const TwoSidedProblem& problem, int rank,
                                 std::uint64_t seed) {
    const int max_rank = static_cast<int>(std::min(problem.n(), problem.m()));
    if (rank < 1 || rank > max_rank)
        throw ConfigError("make_two_sided_init: rank out of range");

    std::mt19937_64 rng(seed);
    const Eigen::PartialPivLU<Eigen::MatrixXd> v_lu(problem.v_basis);
    const Eigen::PartialPivLU<Eigen::MatrixXd> ut_lu(problem.u_rows.transpose());
    constexpr double kMinComponent = 1e-2;

    LowRankState state;
    for (int attempt = 0; attempt < 500; ++attempt) {
        const Eigen::MatrixXd x = qr_positive(random_normal(problem.n(), rank, rng)).q;
        const Eigen::MatrixXd w = qr_positive(random_normal(problem.m(), rank, rng)).q;
        // expansion coefficients of the basis columns in the eigenbases;
        // every column needs a visible dominant component
        const Eigen::MatrixXd tx = v_lu.solve(x);
        const Eigen::MatrixXd te = ut_lu.solve(w);
        if (tx.row(0).cwiseAbs().minCoeff() < kMinComponent ||
            te.row(0).cwiseAbs().minCoeff() < kMinComponent)
            continue;
        state.x_basis = x;
        state.w_basis = w;
        state.coeff = Eigen::MatrixXd::Identity(rank, rank) / std::sqrt(double(rank));
        return state;
    }
    throw SolverError("make_two_sided_init: could not draw a start containing the "
                      "dominant directions");
}

TwoSidedDlraResult dlra_two_sided_iteration(const TwoSidedProblem& problem,
                                            const LowRankState& init, double eps,
                                            int max_iter) {
    if (!(eps > 0.0))
        throw ConfigError("dlra_two_sided_iteration: eps must be positive");
    const int rank = init.rank();
    if (init.x_basis.rows() != problem.n() || init.w_basis.rows() != problem.m())
        throw ConfigError("dlra_two_sided_iteration: init shape mismatch");

    LowRankState state = init;
    state.coeff /= state.coeff.norm();
    const double target = problem.dominant_product();

    auto alignment = [](const Eigen::MatrixXd& basis, const Eigen::VectorXd& direction) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < basis.cols(); ++i) {
            best = std::min(best, (basis.col(i) - direction).norm());
            best = std::min(best, (basis.col(i) + direction).norm());
        }
        return best;
    };

    TwoSidedDlraResult result;
    double k = 1.0;
    for (int n = 0; n < max_iter; ++n) {
        const auto start = std::chrono::steady_clock::now();

        // K-step: A K (W^T B W) = C K^n (W^T D W)
        const Eigen::MatrixXd b_tilde =
            state.w_basis.transpose() * problem.b * state.w_basis;
        const Eigen::MatrixXd d_tilde =
            state.w_basis.transpose() * problem.d * state.w_basis;
        MultiTermSystem k_sys;
        k_sys.n = problem.n();
        k_sys.m = rank;
        k_sys.left_c.push_back(problem.a);
        k_sys.right_d.push_back(b_tilde);
        const Eigen::MatrixXd k_rhs = problem.c * (state.x_basis * state.coeff) * d_tilde;
        const Eigen::MatrixXd k_new = VectorizedOperator(std::move(k_sys)).solve(k_rhs);
        const Eigen::MatrixXd x_new = qr_positive(k_new).q;

        // L-step on the transposed unknown: B^T L^T (X^T A X)^T = D^T L^n,T (X^T C X)^T
        const Eigen::MatrixXd a_tilde =
            state.x_basis.transpose() * problem.a * state.x_basis;
        const Eigen::MatrixXd c_tilde =
            state.x_basis.transpose() * problem.c * state.x_basis;
        MultiTermSystem l_sys;
        l_sys.n = problem.m();
        l_sys.m = rank;
        l_sys.left_c.push_back(problem.b.transpose());
        l_sys.right_d.push_back(a_tilde.transpose());
        const Eigen::MatrixXd l_rhs = problem.d.transpose() *
                                      (state.w_basis * state.coeff.transpose()) *
                                      c_tilde.transpose();
        const Eigen::MatrixXd l_new_t = VectorizedOperator(std::move(l_sys)).solve(l_rhs);
        const Eigen::MatrixXd w_new = qr_positive(l_new_t).q;

        // S-step with all projections advanced to the new bases
        const Eigen::MatrixXd n_x = x_new.transpose() * state.x_basis;
        const Eigen::MatrixXd n_e = w_new.transpose() * state.w_basis;
        const Eigen::MatrixXd s_init = n_x * state.coeff * n_e.transpose();
        const Eigen::MatrixXd a_hat = x_new.transpose() * problem.a * x_new;
        const Eigen::MatrixXd b_hat = w_new.transpose() * problem.b * w_new;
        const Eigen::MatrixXd c_hat = x_new.transpose() * problem.c * x_new;
        const Eigen::MatrixXd d_hat = w_new.transpose() * problem.d * w_new;
        MultiTermSystem s_sys;
        s_sys.n = rank;
        s_sys.m = rank;
        s_sys.left_c.push_back(a_hat);
        s_sys.right_d.push_back(b_hat);
        const Eigen::MatrixXd s_tilde =
            VectorizedOperator(std::move(s_sys)).solve(c_hat * s_init * d_hat);

        const double k_next = s_tilde.norm();
        if (k_next == 0.0)
            throw DegenerateProblemError("dlra_two_sided_iteration: iterate vanished");
        state.x_basis = x_new;
        state.w_basis = w_new;
        state.coeff = s_tilde / k_next;

        const double delta = std::abs(k_next - k);
        k = k_next;
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.history.record(k, delta, rank, seconds);
        result.k_errors.push_back(std::abs(k - target));
        result.x_align_errors.push_back(alignment(state.x_basis, problem.v1));
        result.w_align_errors.push_back(alignment(state.w_basis, problem.u1));
        if (delta <= eps) {
            result.history.converged = true;
            break;
        }
    }
    if (!result.history.converged)
        throw NonConvergenceError("dlra_two_sided_iteration: no convergence after " +
                                      std::to_string(max_iter) + " iterations",
                                  result.history, k);
    result.k = k;
    result.state = state;
    return result;
}

double fit_geometric_rate(const std::vector<double>& errors) {
    constexpr double kFloor = 1e-13;
    constexpr std::size_t kWindow = 20;

    std::vector<std::pair<int, double>> usable;
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (errors[i] > kFloor) usable.emplace_back(static_cast<int>(i), errors[i]);
    if (usable.size() < 10)
        throw MeasurementError("fit_geometric_rate: need at least 10 entries above the "
                               "1e-13 floor, have " + std::to_string(usable.size()));

    const std::size_t begin = usable.size() > kWindow ? usable.size() - kWindow : 0;
    double sn = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = begin; i < usable.size(); ++i) {
        const double x = usable[i].first;
        const double y = std::log(usable[i].second);
        sn += 1.0;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (sn * sxy - sx * sy) / (sn * sxx - sx * sx);
    return std::exp(slope);
}

}  // namespace dlrk
