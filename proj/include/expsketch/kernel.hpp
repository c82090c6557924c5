#pragma once

#include "expsketch/signal.hpp"

namespace expsketch {

/// Basis of ker(A) (one vector per column) by Gauss-Jordan elimination with partial
/// pivoting. Entries below `tol` times the largest pivot candidate count as zero.
Matrix null_space_basis(const Matrix& A, double tol = 1e-10);

}  // namespace expsketch
