#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace logarch {

/// Raised on invalid input or an invariant violation in any public operation.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Observed outcomes over n units and T periods. Column t of `y` is period t+1;
/// `y0` holds the initial (period 0) vector. `x[t]` is the n x k covariate
/// matrix of period t+1.
struct PanelData {
    Eigen::MatrixXd y;
    Eigen::VectorXd y0;
    std::vector<Eigen::MatrixXd> x;

    [[nodiscard]] Eigen::Index units() const { return y.rows(); }
    [[nodiscard]] Eigen::Index periods() const { return y.cols(); }
    [[nodiscard]] Eigen::Index covariates() const { return x.empty() ? 0 : x.front().cols(); }

    /// Throws Error when the dimensions disagree.
    void validate() const;
};

/// Log-squared outcomes, Y* = log Y^2.
struct LogSquaredPanel {
    Eigen::MatrixXd ystar;
    Eigen::VectorXd ystar0;
    std::size_t floored_cells = 0;
};

/// Nonnegative n x n network weights with a zero diagonal.
class WeightMatrix {
public:
    WeightMatrix() = default;
    /// Validates nonnegativity, squareness and the zero diagonal.
    explicit WeightMatrix(Eigen::MatrixXd m);

    [[nodiscard]] const Eigen::MatrixXd& matrix() const { return m_; }
    [[nodiscard]] Eigen::Index size() const { return m_.rows(); }
    [[nodiscard]] bool row_normalized() const { return row_normalized_; }
    /// Spectral radius of M. Computed on construction.
    [[nodiscard]] double spectral_radius() const { return spectral_radius_; }
    /// Eigenvalues of M (complex in general).
    [[nodiscard]] const Eigen::VectorXcd& eigenvalues() const { return eigenvalues_; }

    /// Open interval of rho for which I - rho*M is invertible and the
    /// uniform prior on rho is supported: (-1, 1) when row-normalized,
    /// (-1/tau, 1/tau) otherwise.
    [[nodiscard]] std::pair<double, double> rho_support() const;

private:
    friend WeightMatrix row_normalize(const WeightMatrix&);

    Eigen::MatrixXd m_;
    Eigen::VectorXcd eigenvalues_;
    double spectral_radius_ = 0.0;
    bool row_normalized_ = false;
};

struct SpatialParams {
    double rho = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
};

enum class StabilityCriterion { SufficientCondition, SpectralRadius };

struct StabilityVerdict {
    bool stable = false;
    StabilityCriterion criterion = StabilityCriterion::SufficientCondition;
    /// |rho|+|gamma|+|delta| for the sufficient condition, or the spectral
    /// radius of A(rho, phi) for the eigenvalue criterion.
    double value = 0.0;
};

/// Y* = log(max(Y^2, floor)) cellwise, including the initial vector.
LogSquaredPanel log_squared_transform(const PanelData& panel, double floor = 1e-12);

/// Divides each row with positive sum by that sum. Zero rows stay zero.
WeightMatrix row_normalize(const WeightMatrix& m);

/// Binary queen adjacency on a rows x cols lattice, cells numbered row-major.
WeightMatrix queen_contiguity(int rows, int cols);

/// Inverse correlation-distance weights m_ij = min(1/sqrt(2(1 - r_ij)), cap)
/// built from the rows of `series` (one row per unit).
WeightMatrix correlation_network(const Eigen::MatrixXd& series, double cap = 1e6);

/// S(rho) = I - rho*M. Throws if rho is outside the invertibility interval.
Eigen::MatrixXd build_s(const WeightMatrix& m, double rho);

/// log|det S(rho)| through a partial-pivot LU factorization.
double log_abs_det_s(const WeightMatrix& m, double rho);

/// log|det S(rho)| = sum_i log|1 - rho*w_i| from the cached eigenvalues of M.
double log_abs_det_s_spectral(const WeightMatrix& m, double rho);

/// A(rho, phi) = S(rho)^{-1} (gamma*I + delta*M).
Eigen::MatrixXd reduced_form_transition(const WeightMatrix& m, const SpatialParams& p);

StabilityVerdict stability_check(const SpatialParams& p, const WeightMatrix& m);

/// True when |rho|+|gamma|+|delta| < 1.
inline bool within_stability_bound(double rho, double gamma, double delta) {
    return std::abs(rho) + std::abs(gamma) + std::abs(delta) < 1.0;
}

}  // namespace logarch
