#pragma once

#include <cmath>
#include <vector>

#include "iasim/complex_matrix.hpp"
#include "iasim/eig.hpp"
#include "iasim/network.hpp"

namespace iasim {

/// Per-user precoders on one subcarrier: F[k] is tx_antennas[k] x streams.
using PrecoderSlice = std::vector<CMatrix>;

/// Network sum rate on one subcarrier in bits/s/Hz:
///   sum_k log2 det(I + (sigma2 I + R_k)^-1 Hkk Qk Hkk*),
///   R_k = sum_{m != k} Hkm Qm Hkm*,  Qm = power_scale * Fm Fm*.
/// power_scale folds the symbol-power convention (1/Ns for orthonormal
/// precoders, 1 for equal-column-norm precoders scaled to 1/sqrt(Ns)).
/// Evaluated through the noise-whitened Hermitian form, so the determinant
/// argument is provably PSD and the result exactly real.
inline double sum_rate_slice(const ChannelSet& set, const PrecoderSlice& f, int subcarrier,
                             double sigma2, double power_scale) {
    const NetworkDims& d = set.dims();
    double rate = 0.0;
    for (int k = 0; k < d.users; ++k) {
        const int nr = d.rx_antennas[k];
        CMatrix cov = sigma2 * CMatrix::identity(nr);
        for (int m = 0; m < d.users; ++m) {
            if (m == k) continue;
            const CMatrix hf = set.at(k, m, subcarrier) * f[m];
            cov += power_scale * (hf * hf.adjoint());
        }
        const CMatrix hf = set.at(k, k, subcarrier) * f[k];
        const CMatrix sig = power_scale * (hf * hf.adjoint());
        // det(I + cov^-1 sig) = det(I + L sig L*) with L = cov^{-1/2}.
        const CMatrix wh = inverse(hermitian_sqrt(cov));
        const CMatrix m = wh * sig * wh.adjoint();
        for (const auto& p : eig_hermitian(m))
            rate += std::log2(1.0 + std::max(0.0, p.value.real()));
    }
    return rate;
}

/// Eq.-style sum rate averaged over all subcarriers.
inline double sum_rate_set(const ChannelSet& set,
                           const std::vector<PrecoderSlice>& f_per_subcarrier,
                           double sigma2, double power_scale) {
    const int nsc = set.dims().subcarriers;
    double acc = 0.0;
    for (int n = 0; n < nsc; ++n)
        acc += sum_rate_slice(set, f_per_subcarrier[n], n, sigma2, power_scale);
    return acc / (double)nsc;
}

}  // namespace iasim
