#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "wegnerlab/random.hpp"

namespace wegnerlab {

// Seeded random matrices for the verification harnesses.

/// Hermitian with iid complex Gaussian entries, scaled so ||A|| is O(scale).
Eigen::MatrixXcd random_hermitian(Eigen::Index dim, double scale, CounterStream& stream);

/// Haar-like unitary from the QR factorization of a complex Gaussian matrix.
Eigen::MatrixXcd random_unitary(Eigen::Index dim, CounterStream& stream);

/// U diag(lambda) U^dagger with lambda uniform in [min_eig, max_eig] and the
/// largest pinned to max_eig.
Eigen::MatrixXcd random_psd(Eigen::Index dim, double min_eig, double max_eig, CounterStream& stream);

/// PSD of the given rank (the remaining eigenvalues exactly zero).
Eigen::MatrixXcd random_psd_rank(Eigen::Index dim, Eigen::Index rank, double max_eig, CounterStream& stream);

Eigen::VectorXcd random_unit_vector(Eigen::Index dim, CounterStream& stream);

/// Orthogonal projector onto a random subspace of the given rank.
Eigen::MatrixXcd random_projector(Eigen::Index dim, Eigen::Index rank, CounterStream& stream);

}  // namespace wegnerlab
