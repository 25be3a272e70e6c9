#include "logarch/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace logarch {

namespace {

Eigen::VectorXcd eigenvalues_of(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return {};
    if (m.isApprox(m.transpose(), 0.0)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cast<std::complex<double>>();
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    return es.eigenvalues();
}

}  // namespace

void PanelData::validate() const {
    if (y0.size() != y.rows()) {
        throw Error("panel: Y0 has " + std::to_string(y0.size()) + " entries but Y has " +
                    std::to_string(y.rows()) + " rows");
    }
    if (!x.empty() && static_cast<Eigen::Index>(x.size()) != y.cols()) {
        throw Error("panel: covariates cover " + std::to_string(x.size()) + " periods, expected " +
                    std::to_string(y.cols()));
    }
    const auto k = covariates();
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (x[t].rows() != y.rows() || x[t].cols() != k) {
            throw Error("panel: covariate block for period " + std::to_string(t + 1) +
                        " has inconsistent shape");
        }
    }
}

WeightMatrix::WeightMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw Error("weights: matrix is not square");
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
        if (m_(i, i) != 0.0) {
            throw Error("weights: nonzero diagonal at " + std::to_string(i));
        }
        for (Eigen::Index j = 0; j < m_.cols(); ++j) {
            if (!std::isfinite(m_(i, j)) || m_(i, j) < 0.0) {
                throw Error("weights: negative or non-finite entry at (" + std::to_string(i) + "," +
                            std::to_string(j) + ")");
            }
        }
    }
    eigenvalues_ = eigenvalues_of(m_);
    spectral_radius_ = eigenvalues_.size() ? eigenvalues_.cwiseAbs().maxCoeff() : 0.0;
}

std::pair<double, double> WeightMatrix::rho_support() const {
    if (row_normalized_) return {-1.0, 1.0};
    if (spectral_radius_ <= 0.0) {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
    return {-1.0 / spectral_radius_, 1.0 / spectral_radius_};
}

LogSquaredPanel log_squared_transform(const PanelData& panel, double floor) {
    if (!(floor > 0.0)) throw Error("log_squared_transform: floor must be positive");
    panel.validate();
    LogSquaredPanel out;
    auto transform = [&](double v, Eigen::Index i, Eigen::Index t) {
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "log_squared_transform: non-finite value at unit " << i << ", time " << t;
            throw Error(msg.str());
        }
        double sq = v * v;
        if (sq < floor) {
            sq = floor;
            ++out.floored_cells;
        }
        return std::log(sq);
    };
    out.ystar.resize(panel.y.rows(), panel.y.cols());
    out.ystar0.resize(panel.y0.size());
    for (Eigen::Index i = 0; i < panel.y0.size(); ++i) out.ystar0(i) = transform(panel.y0(i), i, 0);
    for (Eigen::Index t = 0; t < panel.y.cols(); ++t) {
        for (Eigen::Index i = 0; i < panel.y.rows(); ++i) {
            out.ystar(i, t) = transform(panel.y(i, t), i, t + 1);
        }
    }
    return out;
}

WeightMatrix row_normalize(const WeightMatrix& m) {
    Eigen::MatrixXd w = m.matrix();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        const double s = w.row(i).sum();
        if (s > 0.0) w.row(i) /= s;
    }
    WeightMatrix out(std::move(w));
    out.row_normalized_ = true;
    return out;
}

WeightMatrix queen_contiguity(int rows, int cols) {
    if (rows < 1 || cols < 1 || rows * cols < 2) {
        throw Error("queen_contiguity: grid must contain at least two cells");
    }
    const int n = rows * cols;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const int rr = r + dr;
                    const int cc = c + dc;
                    if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
                    w(r * cols + c, rr * cols + cc) = 1.0;
                }
            }
        }
    }
    return WeightMatrix(std::move(w));
}

WeightMatrix correlation_network(const Eigen::MatrixXd& series, double cap) {
    if (!(cap > 0.0)) throw Error("correlation_network: cap must be positive");
    const Eigen::Index n = series.rows();
    const Eigen::Index len = series.cols();
    if (len < 2) throw Error("correlation_network: need at least two observations per series");
    Eigen::MatrixXd centered = series.colwise() - series.rowwise().mean();
    Eigen::VectorXd norms = centered.rowwise().norm();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(norms(i) > 0.0) || !std::isfinite(norms(i))) {
            throw Error("correlation_network: series " + std::to_string(i) + " has zero variance");
        }
    }
    Eigen::MatrixXd z = norms.cwiseInverse().asDiagonal() * centered;
    Eigen::MatrixXd corr = z * z.transpose();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double r = std::clamp(corr(i, j), -1.0, 1.0);
            const double d = std::sqrt(2.0 * (1.0 - r));
            w(i, j) = d > 0.0 ? std::min(1.0 / d, cap) : cap;
        }
    }
    // Make exact symmetry hold regardless of round-off in the product above.
    w = 0.5 * (w + w.transpose()).eval();
    return WeightMatrix(std::move(w));
}

namespace {

void check_rho(const WeightMatrix& m, double rho) {
    const auto [lo, hi] = m.rho_support();
    if (!(rho > lo && rho < hi)) {
        std::ostringstream msg;
        msg << "rho = " << rho << " outside the invertibility interval (" << lo << ", " << hi << ")";
        throw Error(msg.str());
    }
}

}  // namespace

Eigen::MatrixXd build_s(const WeightMatrix& m, double rho) {
    check_rho(m, rho);
    const auto n = m.size();
    return Eigen::MatrixXd::Identity(n, n) - rho * m.matrix();
}

double log_abs_det_s(const WeightMatrix& m, double rho) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(build_s(m, rho));
    return lu.matrixLU().diagonal().array().abs().log().sum();
}

double log_abs_det_s_spectral(const WeightMatrix& m, double rho) {
    check_rho(m, rho);
    double acc = 0.0;
    for (const auto& w : m.eigenvalues()) acc += std::log(std::abs(1.0 - rho * w));
    return acc;
}

Eigen::MatrixXd reduced_form_transition(const WeightMatrix& m, const SpatialParams& p) {
    const auto n = m.size();
    Eigen::MatrixXd rhs = p.gamma * Eigen::MatrixXd::Identity(n, n) + p.delta * m.matrix();
    return build_s(m, p.rho).partialPivLu().solve(rhs);
}

StabilityVerdict stability_check(const SpatialParams& p, const WeightMatrix& m) {
    StabilityVerdict v;
    if (m.row_normalized()) {
        v.criterion = StabilityCriterion::SufficientCondition;
        v.value = std::abs(p.rho) + std::abs(p.gamma) + std::abs(p.delta);
        if (v.value < 1.0) {
            v.stable = true;
            return v;
        }
    }
    v.criterion = StabilityCriterion::SpectralRadius;
    const auto [lo, hi] = m.rho_support();
    if (!(p.rho > lo && p.rho < hi)) {
        v.stable = false;
        v.value = std::numeric_limits<double>::infinity();
        return v;
    }
    const Eigen::MatrixXd a = reduced_form_transition(m, p);
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    v.value = a.rows() ? es.eigenvalues().cwiseAbs().maxCoeff() : 0.0;
    v.stable = v.value < 1.0;
    return v;
}

}  // namespace logarch
