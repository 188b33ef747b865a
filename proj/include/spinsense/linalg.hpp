#pragma once

#include <array>
#include <complex>
#include <vector>

namespace spinsense {

using Mat4 = std::array<std::array<double, 4>, 4>;
using CMat4 = std::array<std::array<std::complex<double>, 4>, 4>;

// Cyclic Jacobi rotations on a dense symmetric matrix (row-major, n x n). Returns ascending eigenvalues.
std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n, double tol = 1e-15);

std::array<double, 4> symmetric_eigenvalues(const Mat4& m);

// Eigenvalues of a Hermitian 4x4 via its real 8x8 embedding [[Re,-Im],[Im,Re]].
std::array<double, 4> hermitian_eigenvalues(const CMat4& m);

}  // namespace spinsense
