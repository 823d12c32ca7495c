#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "dube/dataset.hpp"
#include "dube/rng.hpp"

namespace dube {

/// Per-class Gaussian calibration for perturbation-based augmentation.
struct ClassCovariance {
    ClassId cls = 0;
    std::size_t count = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;     ///< unbiased, symmetrised, PSD
    Eigen::MatrixXd factor;  ///< factor * factor^T == cov (up to jitter)
};

/// Unbiased (n - 1) covariance of class `c`. A singleton class yields a zero
/// matrix. Negative eigenvalues from rounding are clipped to zero.
ClassCovariance class_covariance(const Dataset& ds, ClassId c);

/// Lower-triangular (or symmetric, when Cholesky fails) factor of a PSD
/// matrix: Cholesky with diagonal jitter from 1e-12 up to 1e-6, then an
/// eigen-decomposition with negative eigenvalues clipped.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov);

/// Returns samples[j] + alpha * z_j with z_j ~ N(0, cov.cov), drawn
/// independently per row. `samples` is row-major with cov.mean.size() columns.
std::vector<double> perturb(const std::vector<double>& samples, double alpha, const ClassCovariance& cov,
                            Rng& rng);

}  // namespace dube
