#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cnca {

enum class TauMode { a, b };

/**
 * Kendall rank correlation between two score (or ranking) vectors, by
 * Knight's O(n log n) merge-sort inversion count.
 *
 * With n0 = n(n-1)/2 pairs, concordant minus discordant S, n1/n2 the pairs
 * tied in x/y:
 *   tau_a = S / n0
 *   tau_b = S / sqrt((n0 - n1)(n0 - n2))
 * tau_b is 0 when either vector is constant. Throws ParameterError on a
 * length mismatch or n < 2.
 */
double kendall_tau(std::span<const double> x, std::span<const double> y, TauMode mode = TauMode::b);

/// Rankings as doubles, for passing rank_of() output to kendall_tau.
std::vector<double> as_scores(std::span<const std::size_t> ranking);

/// Dense N x F real matrix, row-major.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;
};

/**
 * Projects mean-centred rows onto the top two principal directions.
 *
 * Eigenvectors come from power iteration with deflation (start vector
 * fixed, stop when successive iterates differ by < 1e-9), run on the
 * smaller of the covariance and Gram matrices. Each direction's sign is
 * chosen so that its first nonzero loading is positive. Directions with
 * zero variance give zero coordinates, so a constant input maps to zeros.
 * Requires N >= 2 and F >= 2.
 */
DenseMatrix pca_project_2d(const DenseMatrix& h);

}  // namespace cnca
