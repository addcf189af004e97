#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "agb/error.hpp"
#include "agb/linalg.hpp"

namespace agb {

std::vector<double> solve_least_squares(const Matrix& X, const std::vector<double>& y) {
    const std::size_t n = X.rows, p = X.cols;
    if (y.size() != n) throw DataError("least squares: y length mismatch");
    if (n < p) throw DataError("least squares: fewer rows than columns");
    if (p == 0) throw DataError("least squares: empty design");

    // Column-major working copy; Householder vectors overwrite the
    // subdiagonal of each column.
    std::vector<double> a(n * p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) a[j * n + i] = X.at(i, j);
    std::vector<double> qty = y;
    std::vector<std::size_t> piv(p);
    std::iota(piv.begin(), piv.end(), 0);

    double maxDiag = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
        // Pivot on the largest residual column norm, recomputed exactly.
        std::size_t best = k;
        double bestNorm = -1.0;
        for (std::size_t j = k; j < p; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += a[j * n + i] * a[j * n + i];
            if (s > bestNorm) {
                bestNorm = s;
                best = j;
            }
        }
        if (best != k) {
            for (std::size_t i = 0; i < n; ++i) std::swap(a[best * n + i], a[k * n + i]);
            std::swap(piv[best], piv[k]);
        }

        const double norm = std::sqrt(std::max(bestNorm, 0.0));
        maxDiag = std::max(maxDiag, norm);
        const double tol =
            maxDiag * static_cast<double>(std::max(n, p)) * std::numeric_limits<double>::epsilon();
        if (norm <= tol || norm == 0.0)
            throw RankDeficient("design matrix is rank deficient at column " +
                                    std::to_string(piv[k]),
                                static_cast<int>(piv[k]));

        double* col = &a[k * n];
        const double alpha = col[k] >= 0.0 ? -norm : norm;
        col[k] -= alpha;  // v = x - alpha*e1 stored in place
        double vtv = 0.0;
        for (std::size_t i = k; i < n; ++i) vtv += col[i] * col[i];
        const double w = 2.0 / vtv;

        for (std::size_t j = k + 1; j < p; ++j) {
            double* cj = &a[j * n];
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += col[i] * cj[i];
            const double s = w * dot;
            for (std::size_t i = k; i < n; ++i) cj[i] -= s * col[i];
        }
        {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += col[i] * qty[i];
            const double s = w * dot;
            for (std::size_t i = k; i < n; ++i) qty[i] -= s * col[i];
        }
        col[k] = alpha;  // R diagonal
    }

    // Back substitution on R (upper triangle lives above the Householder
    // vectors; entry R[k][j] is a[j*n + k] for j >= k).
    std::vector<double> z(p);
    for (std::size_t k = p; k-- > 0;) {
        double s = qty[k];
        for (std::size_t j = k + 1; j < p; ++j) s -= a[j * n + k] * z[j];
        z[k] = s / a[k * n + k];
    }

    std::vector<double> beta(p);
    for (std::size_t j = 0; j < p; ++j) beta[piv[j]] = z[j];
    return beta;
}

}  // namespace agb
