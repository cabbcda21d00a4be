#pragma once

// Test-only reference: dense 2N x 2N one-step matrix S (C (x) I) applied to
// the flattened state vector, index 2n + s with s = 0 (up), 1 (down).

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace qwalk::oracle {

using cplx = std::complex<double>;

struct DenseState {
    std::size_t sites = 0;
    std::vector<cplx> amps; // size 2 * sites
};

inline std::vector<cplx> step_matrix(const std::vector<double>& angles)
{
    const std::size_t n = angles.size();
    const std::size_t dim = 2 * n;
    std::vector<cplx> u(dim * dim);
    auto at = [&](std::size_t row, std::size_t col) -> cplx& { return u[row * dim + col]; };
    for (std::size_t site = 0; site < n; ++site) {
        const double c = std::cos(angles[site]);
        const double s = std::sin(angles[site]);
        const double coin[2][2] = {{c, s}, {s, -c}};
        for (std::size_t from = 0; from < 2; ++from) {
            if (site + 1 < n) {
                at(2 * (site + 1) + 0, 2 * site + from) = coin[0][from];
            }
            if (site >= 1) {
                at(2 * (site - 1) + 1, 2 * site + from) = coin[1][from];
            }
        }
    }
    return u;
}

inline DenseState apply(const std::vector<cplx>& u, const DenseState& in)
{
    const std::size_t dim = in.amps.size();
    DenseState out{in.sites, std::vector<cplx>(dim)};
    for (std::size_t row = 0; row < dim; ++row) {
        cplx acc{};
        for (std::size_t col = 0; col < dim; ++col) {
            acc += u[row * dim + col] * in.amps[col];
        }
        out.amps[row] = acc;
    }
    return out;
}

} // namespace qwalk::oracle
