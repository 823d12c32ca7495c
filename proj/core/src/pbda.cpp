#include "dube/pbda.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <stdexcept>

namespace dube {

ClassCovariance class_covariance(const Dataset& ds, ClassId c)
{
    if (c >= ds.num_classes() || ds.class_rows(c).empty()) {
        throw std::invalid_argument("class_covariance: class is empty");
    }
    const auto& rows = ds.class_rows(c);
    const auto d = static_cast<Eigen::Index>(ds.dims());
    ClassCovariance out;
    out.cls = c;
    out.count = rows.size();
    out.mean = Eigen::VectorXd::Zero(d);
    for (std::size_t r : rows) {
        out.mean += Eigen::Map<const Eigen::VectorXd>(ds.row(r).data(), d);
    }
    out.mean /= static_cast<double>(rows.size());

    out.cov = Eigen::MatrixXd::Zero(d, d);
    if (rows.size() > 1) {
        for (std::size_t r : rows) {
            const Eigen::VectorXd diff = Eigen::Map<const Eigen::VectorXd>(ds.row(r).data(), d) - out.mean;
            out.cov.noalias() += diff * diff.transpose();
        }
        out.cov /= static_cast<double>(rows.size() - 1);
        out.cov = (0.5 * (out.cov + out.cov.transpose())).eval();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.cov);
        if (eig.eigenvalues().minCoeff() < 0.0) {
            const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
            out.cov = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
            out.cov = (0.5 * (out.cov + out.cov.transpose())).eval();
        }
    }
    out.factor = psd_factor(out.cov);
    return out;
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov)
{
    const auto d = cov.rows();
    if (cov.isZero(0.0)) {
        return Eigen::MatrixXd::Zero(d, d);
    }
    for (double jitter = 0.0; jitter <= 1e-6; jitter = jitter == 0.0 ? 1e-12 : jitter * 10.0) {
        Eigen::MatrixXd shifted = cov;
        shifted.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() == Eigen::Success) {
            return llt.matrixL();
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

std::vector<double> perturb(const std::vector<double>& samples, double alpha, const ClassCovariance& cov,
                            Rng& rng)
{
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("perturbation coefficient alpha must be >= 0");
    }
    const auto d = static_cast<std::size_t>(cov.mean.size());
    if (d == 0 || samples.size() % d != 0) {
        throw std::invalid_argument("perturb: sample dimension does not match covariance");
    }
    std::vector<double> out(samples);
    if (alpha == 0.0 || cov.factor.isZero(0.0)) {
        return out;
    }
    const std::size_t n = samples.size() / d;
    Eigen::VectorXd z(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < z.size(); ++j) {
            z[j] = rng.normal();
        }
        const Eigen::VectorXd step = alpha * (cov.factor * z);
        for (std::size_t j = 0; j < d; ++j) {
            out[i * d + j] += step[static_cast<Eigen::Index>(j)];
        }
    }
    return out;
}

}  // namespace dube
