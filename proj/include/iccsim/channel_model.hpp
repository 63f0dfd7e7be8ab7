// SPDX-License-Identifier: Apache-2.0
//
// iccsim - independence-checking-coded uplink training simulation for
// large-scale MISO-OFDM under pilot-aware attack
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef iccsim_channel_model_H
#define iccsim_channel_model_H

#include <armadillo>
#include <complex>

#include "common.hpp"
#include "rng.hpp"

namespace iccsim
{
    // ---------- ONE-RING GEOMETRY ----------

    // Uniform linear array watching a scattering ring: mean angle of arrival
    // theta, angle spread delta (half-width, radians), antenna spacing in
    // wavelengths. The served sector is [-pi/3, pi/3]; no energy arrives
    // outside it.
    struct one_ring_params
    {
        double theta = 0.0;
        double delta = pi / 24.0;
        double spacing = 0.5;
        arma::uword n_antennas = 1;
    };

    void validate(const one_ring_params &p); // throws std::invalid_argument

    // ---------- COVARIANCE AND EIGENSTRUCTURE ----------

    // Hermitian, unit-diagonal, positive-semidefinite spatial covariance.
    // rank counts eigenvalues above the module-wide relative threshold.
    struct covariance_matrix
    {
        arma::cx_mat entries;
        arma::uword rank = 0;
    };

    // Truncated eigendecomposition: orthonormal columns, descending positive
    // values, and their reciprocals. values[i] * pseudo_values[i] = 1.
    struct eigen_structure
    {
        arma::cx_mat vectors; // n x rho
        arma::vec values;     // rho, descending
        arma::vec pseudo_values;

        arma::uword rank() const { return values.n_elem; }

        // U * diag(values) * U^H
        arma::cx_mat reconstruct() const;
        // U * diag(1/values) * U^H
        arma::cx_mat pseudo_inverse() const;
    };

    // Eigenvalues below rel_threshold * lambda_max are discarded.
    inline constexpr double default_rank_threshold = 1e-6;

    // Per-tap channel realizations for the legitimate user and the attacker,
    // one row per antenna, one column per tap. pdp sums to one.
    struct channel_realization
    {
        arma::cx_mat bob_cirs; // N_T x L
        arma::cx_mat ava_cirs; // N_T x L
        arma::vec pdp;         // length L
    };

    // Spectral square root W with W * W^H = R, used to draw correlated taps.
    // Construction applies the PSD repair: eigenvalues in [-1e-6*max, 0) are
    // clipped to zero, anything lower is an error.
    struct covariance_factor
    {
        arma::cx_mat factor; // N_T x N_T
    };

    // ---------- DFT SLICES ----------

    // s x L slice of the unnormalized DFT, matrix[r, l] =
    // exp(-j 2 pi rows[r] l / N). This sign and scale convention is the single
    // constant used everywhere: unit-modulus entries, no sqrt(N) factors.
    // gram = matrix^T * conj(matrix) is the L x L form whose trace is s*L.
    struct dft_submatrix
    {
        arma::uword n_fft = 0;
        arma::uvec rows;
        arma::cx_mat matrix;     // s x L
        arma::cx_mat gram;       // L x L
        eigen_structure gram_eig;
    };

    // ---------- OPERATIONS ----------

    // Entry (m, n) = (1/2 delta) * integral over [theta - delta, theta + delta]
    // of exp(-j 2 pi D (m - n) sin(alpha)) d alpha, adaptive Simpson with
    // absolute error <= 1e-10. The matrix is Toeplitz in m - n.
    covariance_matrix one_ring_covariance(const one_ring_params &p);

    covariance_factor covariance_sqrt(const covariance_matrix &cov);

    // Tap l across antennas is factor * g * sqrt(pdp[l]) with g iid CN(0, 1);
    // taps independent, users independent. pdp is uniform 1/L.
    channel_realization sample_cir(const one_ring_params &bob, const one_ring_params &ava,
                                   arma::uword taps, std::uint64_t seed);
    channel_realization sample_cir(const covariance_factor &bob, const covariance_factor &ava,
                                   arma::uword taps, rng &stream);

    dft_submatrix make_dft_submatrix(arma::uword n_fft, arma::uword taps, const arma::uvec &rows);

    eigen_structure eigendecompose(const covariance_matrix &cov,
                                   double rel_threshold = default_rank_threshold);
    eigen_structure eigendecompose_hermitian(const arma::cx_mat &m,
                                             double rel_threshold = default_rank_threshold);

    // Per-antenna FS covariance on the selected rows:
    // C_F = matrix * diag(pdp) * conj(matrix^T), s x s, trace s, rank
    // min{s, L}. Its pseudo-spectrum is the frequency factor of the decision
    // quadratic form; the antenna-major layout then satisfies
    // E f(h) = rho1 * min(s, L).
    arma::cx_mat fs_covariance(const dft_submatrix &f, const arma::vec &pdp);

    // Spectral support comparison on the virtual-angle axis x in [-1/2, 1/2)
    // at resolution 1/N_T. Supports are the arcs
    // [D sin(theta - delta), D sin(theta + delta)] (mod 1). a counts grid
    // points in both supports; rho1 counts points in the first.
    struct overlap_report
    {
        arma::uword a_estimate = 0;
        arma::uword rho1_estimate = 0;
        bool disjoint = true;
    };

    overlap_report support_overlap(const one_ring_params &bob, const one_ring_params &ava);
}

#endif
