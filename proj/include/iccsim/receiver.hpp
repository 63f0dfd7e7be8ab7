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

#ifndef iccsim_receiver_H
#define iccsim_receiver_H

#include <cstdint>
#include <optional>
#include <vector>

#include <armadillo>

#include "iccsim/airlink.hpp"
#include "iccsim/channel_model.hpp"
#include "iccsim/icc_code.hpp"

namespace iccsim
{
    // ---------- SAP DETECTION ----------

    struct detector_config
    {
        double target_pf = 1e-3; // per-subcarrier false-alarm probability
        double noise_var = 1.0;  // known at the receiver
        std::size_t symbols_used = 3;
    };

    // Decision threshold for the per-subcarrier average-energy statistic
    //   T = sum_{k<K} sum_{i<N_T} |y|^2 / (K N_T sigma^2),
    // which is chi-square with 2 K N_T degrees of freedom over its mean under
    // noise only. Strictly decreasing in n_t at fixed target_pf.
    double detector_threshold(std::size_t n_t, std::size_t symbols_used,
                              double target_pf);

    // Occupancy decision per designated pilot subcarrier, one 0/1 entry per
    // member of grid.truth.psi_b.
    std::vector<std::uint8_t> detect_sap(const received_grid &grid,
                                         const detector_config &config);

    // ---------- CODEWORD SEPARATION ----------

    enum class subcarrier_class
    {
        idle,
        bob_only,
        other_only,
        both
    };

    struct separation_options
    {
        double phase_tol = 0.0;      // 0 selects pi / phase_resolution
        double coherence_min = 0.85; // below this the subcarrier counts as shared
        std::size_t phase_resolution = 8;
    };

    struct separation_result
    {
        codeword observed; // the superposed activation pattern
        std::optional<codeword> word_bob;
        std::optional<codeword> word_other;
        std::vector<subcarrier_class> per_subcarrier_class; // one per pilot index
    };

    // Differential decoding against the public ramp: an active subcarrier is
    // Bob-compatible when every adjacent-symbol inner-product phase sits
    // within phase_tol of phi_bar, shared when the inner-product coherence
    // drops below coherence_min. word_bob collects Bob-compatible plus shared
    // positions, word_other the rest plus shared; a candidate whose weight is
    // not (N_B + s)/2 stays unresolved. Degrades, never throws.
    separation_result separate_codewords(const received_grid &grid,
                                         const std::vector<std::uint8_t> &observed,
                                         double phi_bar, const codebook &book,
                                         const separation_options &opts = {});

    // ---------- IDENTIFICATION ----------

    enum class hypothesis
    {
        none,
        h0, // word_bob / h_bob is Bob
        h1  // the other candidate is Bob
    };

    enum class identification_status
    {
        no_attack,
        identified,
        ambiguous,
        error
    };

    struct identification_outcome
    {
        identification_status status = identification_status::error;
        std::optional<double> delta_f;
        hypothesis chosen = hypothesis::none;
        bool iep_event = false;
        std::optional<codeword> candidate_bob, candidate_other;
    };

    // Weight-and-membership filter over the separated pair. Exactly one
    // qualifying candidate -> identified; both equal -> identified (mimic);
    // both qualify but differ -> ambiguous (Delta-f enhancement pending); an
    // empty other word beside a clean Bob word -> no_attack. When neither
    // word resolved and the book is materialized, a unique class-consistent
    // pair decomposition of the observed pattern is accepted; anything else
    // is an error.
    identification_outcome identify(const separation_result &sep, const codebook &book);

    // ---------- LMMSE ESTIMATION ----------

    enum class covariance_mode
    {
        sample, // C_Y from the observed 2 x (N_T s) block
        exact   // C_Y = x1 x1^H + x2 x2^H + sigma^2 I
    };

    struct estimation_result
    {
        arma::cx_rowvec h_bob_fs, h_ava_fs; // antenna-major blocks of s
        double nmse_bob = 0.0, nmse_ava = 0.0;
        double mse_bob = 0.0, mse_ava = 0.0; // per-entry, error power / (N_T s)
        std::vector<std::size_t> overlap_set; // subcarrier indices used
        bool ridge_applied = false;
    };

    // Two-symbol LMMSE on the overlapped subcarriers. Y_L is 2 x (N_T s) with
    // one row per symbol; W_B = T x1^H C_Y^{-1} with T = Tr(R_1) Tr(C_F) /
    // (N_T s) = 1 for the unit-diagonal spatial covariance and unit-power
    // frequency factor. NMSEs are against the true FS channels in the grid.
    // first_symbol selects the adjacent symbol window (first_symbol,
    // first_symbol + 1); x1 and x2 must be the pilot values on that window.
    estimation_result lmmse_estimate(const received_grid &grid,
                                     const arma::cx_vec &x1, const arma::cx_vec &x2,
                                     const std::vector<std::size_t> &overlap,
                                     covariance_mode mode = covariance_mode::sample,
                                     std::size_t first_symbol = 0);

    // True FS channel of `cirs` on the listed subcarriers, antenna-major
    // blocks of s (the estimator's layout).
    arma::cx_rowvec stack_fs_channel(const arma::cx_mat &cirs, std::size_t n_fft,
                                     const std::vector<std::size_t> &overlap);

    // ---------- DECISION FUNCTION ----------

    // f(r) = r (pinv(R_1) (x) pinv(C_F)) r^H through the eigen factors:
    //   f = sum_{a,b} |[V^H M conj(U)]_{b,a}|^2 / (lambda_a mu_b)
    // with M the s x N_T unstacking of r, U/lambda from r1, V/mu from cf.
    double decision_function(const arma::cx_rowvec &h_fs, const eigen_structure &r1_eig,
                             const eigen_structure &cf_eig, std::size_t n_t);

    // delta_f = f(h_bob) - f(h_ava) for an estimate pair.
    double delta_f(const estimation_result &est, const eigen_structure &r1_eig,
                   const eigen_structure &cf_eig, std::size_t n_t);

    // Large-N_T reference: L (rho_1 - Tr(R_2 pinv(R_1))).
    double asymptotic_delta_f(const covariance_matrix &r1, const covariance_matrix &r2,
                              std::size_t taps);

    // ---------- ENHANCEMENT ----------

    // delta > tol -> H0, delta < -tol -> H1, the band in between is the
    // identification-error event.
    identification_outcome enhance_identification(const identification_outcome &outcome,
                                                  double delta, double tol);
}

#endif
