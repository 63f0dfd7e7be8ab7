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

#include "iccsim/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "iccsim/common.hpp"

namespace iccsim
{
    // ---------- SAP DETECTION ----------

    double detector_threshold(std::size_t n_t, std::size_t symbols_used,
                              double target_pf)
    {
        if (n_t == 0 || symbols_used == 0)
            throw std::invalid_argument("detector_threshold: empty observation block");
        if (!(target_pf > 0.0 && target_pf < 1.0))
            throw std::invalid_argument("detector_threshold: target_pf must be in (0, 1)");
        const double dof = 2.0 * double(symbols_used) * double(n_t);
        boost::math::chi_squared_distribution<double> dist(dof);
        return boost::math::quantile(dist, 1.0 - target_pf) / dof;
    }

    std::vector<std::uint8_t> detect_sap(const received_grid &grid,
                                         const detector_config &config)
    {
        if (grid.samples.n_slices < config.symbols_used)
            throw std::invalid_argument("detect_sap: grid holds fewer symbols than the detector uses");
        if (config.noise_var <= 0.0)
            throw std::invalid_argument("detect_sap: noise variance must be positive");

        const std::size_t n_t = grid.samples.n_cols;
        const double gamma = detector_threshold(n_t, config.symbols_used, config.target_pf);
        const double scale = 1.0 /
                             (double(config.symbols_used) * double(n_t) * config.noise_var);

        std::vector<std::uint8_t> out(grid.truth.psi_b.size(), 0);
        for (std::size_t j = 0; j < grid.truth.psi_b.size(); j++)
        {
            const std::size_t sc = grid.truth.psi_b[j];
            double energy = 0.0;
            for (std::size_t k = 0; k < config.symbols_used; k++)
                for (std::size_t i = 0; i < n_t; i++)
                    energy += std::norm(grid.samples(sc, i, k));
            out[j] = (energy * scale > gamma) ? 1 : 0;
        }
        return out;
    }

    // ---------- CODEWORD SEPARATION ----------

    separation_result separate_codewords(const received_grid &grid,
                                         const std::vector<std::uint8_t> &observed,
                                         double phi_bar, const codebook &book,
                                         const separation_options &opts)
    {
        separation_result out;
        out.observed.bits.assign(observed.begin(), observed.end());
        out.per_subcarrier_class.assign(observed.size(), subcarrier_class::idle);

        const std::size_t symbols = grid.samples.n_slices;
        const std::size_t n_t = grid.samples.n_cols;
        if (observed.size() != grid.truth.psi_b.size() || symbols < 2 || n_t == 0)
            return out; // degraded, never thrown

        const double tol = opts.phase_tol > 0.0
                               ? opts.phase_tol
                               : pi / double(opts.phase_resolution);

        for (std::size_t j = 0; j < observed.size(); j++)
        {
            if (!observed[j])
                continue;
            const std::size_t sc = grid.truth.psi_b[j];

            bool bob_compatible = true;
            double coherence = 1.0;
            for (std::size_t k = 0; k + 1 < symbols; k++)
            {
                arma::cx_rowvec y0 = grid.samples.slice(k).row(sc);
                arma::cx_rowvec y1 = grid.samples.slice(k + 1).row(sc);
                std::complex<double> d = arma::cdot(y0, y1);
                double denom = std::real(arma::cdot(y0, y0));
                if (denom <= 0.0)
                {
                    bob_compatible = false;
                    coherence = 0.0;
                    break;
                }
                d /= denom;
                coherence = std::min(coherence, std::abs(d));
                if (std::abs(wrap_angle(std::arg(d) - phi_bar)) >= tol)
                    bob_compatible = false;
            }

            if (coherence < opts.coherence_min)
                out.per_subcarrier_class[j] = subcarrier_class::both;
            else if (bob_compatible)
                out.per_subcarrier_class[j] = subcarrier_class::bob_only;
            else
                out.per_subcarrier_class[j] = subcarrier_class::other_only;
        }

        codeword bob, other;
        bob.bits.assign(observed.size(), 0);
        other.bits.assign(observed.size(), 0);
        for (std::size_t j = 0; j < observed.size(); j++)
        {
            switch (out.per_subcarrier_class[j])
            {
            case subcarrier_class::bob_only:
                bob.bits[j] = 1;
                break;
            case subcarrier_class::other_only:
                other.bits[j] = 1;
                break;
            case subcarrier_class::both:
                bob.bits[j] = 1;
                other.bits[j] = 1;
                break;
            case subcarrier_class::idle:
                break;
            }
        }
        if (bob.weight() == book.weight())
            out.word_bob = std::move(bob);
        if (other.weight() == book.weight())
            out.word_other = std::move(other);
        return out;
    }

    // ---------- IDENTIFICATION ----------

    namespace
    {
        // Pair decompositions are only searched on books this small; the scan
        // is quadratic in the word count.
        constexpr std::size_t decomposition_limit = 1024;

        identification_outcome decompose_pair(const separation_result &sep,
                                              const codebook &book)
        {
            identification_outcome out;
            out.status = identification_status::error;
            if (!book.materialized() || book.count() > decomposition_limit ||
                book.length() > 64)
                return out;

            std::uint64_t bob_must = 0, bob_may = 0, other_must = 0, other_may = 0,
                          observed = 0;
            for (std::size_t j = 0; j < sep.per_subcarrier_class.size(); j++)
            {
                const std::uint64_t bit = 1ULL << j;
                switch (sep.per_subcarrier_class[j])
                {
                case subcarrier_class::bob_only:
                    bob_must |= bit;
                    bob_may |= bit;
                    observed |= bit;
                    break;
                case subcarrier_class::other_only:
                    other_must |= bit;
                    other_may |= bit;
                    observed |= bit;
                    break;
                case subcarrier_class::both:
                    bob_may |= bit;
                    other_may |= bit;
                    observed |= bit;
                    break;
                case subcarrier_class::idle:
                    break;
                }
            }

            const auto &words = book.words();
            std::vector<std::uint64_t> masks(words.size());
            for (std::size_t i = 0; i < words.size(); i++)
                masks[i] = words[i].mask();

            std::size_t solutions = 0;
            std::size_t pick_b = 0, pick_o = 0;
            for (std::size_t i = 0; i < masks.size(); i++)
            {
                if ((masks[i] & bob_must) != bob_must || (masks[i] & ~bob_may) != 0)
                    continue;
                for (std::size_t j = 0; j < masks.size(); j++)
                {
                    if ((masks[j] & other_must) != other_must || (masks[j] & ~other_may) != 0)
                        continue;
                    if ((masks[i] | masks[j]) != observed)
                        continue;
                    solutions++;
                    if (solutions > 1)
                        return out;
                    pick_b = i;
                    pick_o = j;
                }
            }
            if (solutions != 1)
                return out;

            out.candidate_bob = words[pick_b];
            out.candidate_other = words[pick_o];
            if (words[pick_b] == words[pick_o])
            {
                out.status = identification_status::identified;
                out.chosen = hypothesis::h0;
            }
            else
                out.status = identification_status::ambiguous;
            return out;
        }
    }

    identification_outcome identify(const separation_result &sep, const codebook &book)
    {
        identification_outcome out;
        out.candidate_bob = sep.word_bob;
        out.candidate_other = sep.word_other;

        const bool bob_ok = sep.word_bob && book.contains(*sep.word_bob);
        const bool other_ok = sep.word_other && book.contains(*sep.word_other);

        bool other_present = false;
        for (auto c : sep.per_subcarrier_class)
            if (c == subcarrier_class::other_only || c == subcarrier_class::both)
                other_present = true;

        if (bob_ok && !other_present)
        {
            // A single clean transmitter on a book word: nothing superposed.
            out.status = identification_status::no_attack;
            out.chosen = hypothesis::h0;
            return out;
        }
        if (bob_ok && other_ok)
        {
            if (*sep.word_bob == *sep.word_other)
            {
                out.status = identification_status::identified;
                out.chosen = hypothesis::h0;
            }
            else
                out.status = identification_status::ambiguous;
            return out;
        }
        if (bob_ok != other_ok)
        {
            out.status = identification_status::identified;
            out.chosen = bob_ok ? hypothesis::h0 : hypothesis::h1;
            return out;
        }
        return decompose_pair(sep, book);
    }

    // ---------- LMMSE ESTIMATION ----------

    arma::cx_rowvec stack_fs_channel(const arma::cx_mat &cirs, std::size_t n_fft,
                                     const std::vector<std::size_t> &overlap)
    {
        arma::uvec idx(overlap.size());
        for (std::size_t i = 0; i < overlap.size(); i++)
            idx(i) = arma::uword(overlap[i]);
        dft_submatrix f = make_dft_submatrix(n_fft, cirs.n_cols, idx);
        arma::cx_mat g = f.matrix * cirs.st(); // s x n_t
        return arma::vectorise(g).st();        // antenna-major blocks of s
    }

    estimation_result lmmse_estimate(const received_grid &grid,
                                     const arma::cx_vec &x1, const arma::cx_vec &x2,
                                     const std::vector<std::size_t> &overlap,
                                     covariance_mode mode, std::size_t first_symbol)
    {
        if (overlap.empty())
            throw std::invalid_argument("lmmse_estimate: empty overlap set");
        if (grid.samples.n_slices < first_symbol + 2)
            throw std::invalid_argument("lmmse_estimate: need two training symbols");
        if (x1.n_elem != 2 || x2.n_elem != 2)
            throw std::invalid_argument("lmmse_estimate: pilot vectors must have length 2");

        const std::size_t s = overlap.size();
        const std::size_t n_t = grid.samples.n_cols;
        const std::size_t cols = n_t * s;

        arma::cx_mat y(2, cols);
        for (std::size_t k = 0; k < 2; k++)
            for (std::size_t i = 0; i < n_t; i++)
                for (std::size_t r = 0; r < s; r++)
                    y(k, i * s + r) = grid.samples(overlap[r], i, first_symbol + k);

        arma::cx_mat cy(2, 2);
        if (mode == covariance_mode::sample)
            cy = y * y.t() / double(cols);
        else
            cy = x1 * x1.t() + x2 * x2.t() +
                 grid.noise_var * arma::cx_mat(2, 2, arma::fill::eye);

        estimation_result out;
        out.overlap_set = overlap;

        arma::cx_mat cy_inv;
        if (!arma::inv(cy_inv, cy))
        {
            cy += 1e-10 * std::abs(arma::trace(cy)) *
                  arma::cx_mat(2, 2, arma::fill::eye);
            out.ridge_applied = true;
            if (!arma::inv(cy_inv, cy))
                throw std::runtime_error("lmmse_estimate: covariance inversion failed");
        }

        // T = Tr(R_1) Tr(C_F) / (N_T s); the spatial covariance has a unit
        // diagonal and the frequency factor's diagonal is sum(pdp) per row,
        // so only the power-delay profile survives.
        const double t_gain = arma::accu(grid.truth.channels.pdp);

        arma::cx_rowvec wb = t_gain * (x1.t() * cy_inv);
        arma::cx_rowvec wa = t_gain * (x2.t() * cy_inv);
        out.h_bob_fs = wb * y;
        out.h_ava_fs = wa * y;

        arma::cx_rowvec hb = stack_fs_channel(grid.truth.channels.bob_cirs,
                                              grid.n_fft, overlap);
        arma::cx_rowvec ha = stack_fs_channel(grid.truth.channels.ava_cirs,
                                              grid.n_fft, overlap);
        double pb = std::real(arma::cdot(hb, hb));
        double pa = std::real(arma::cdot(ha, ha));
        arma::cx_rowvec eb = out.h_bob_fs - hb;
        arma::cx_rowvec ea = out.h_ava_fs - ha;
        out.nmse_bob = pb > 0.0 ? std::real(arma::cdot(eb, eb)) / pb : 0.0;
        out.nmse_ava = pa > 0.0 ? std::real(arma::cdot(ea, ea)) / pa : 0.0;
        out.mse_bob = std::real(arma::cdot(eb, eb)) / double(eb.n_elem);
        out.mse_ava = std::real(arma::cdot(ea, ea)) / double(ea.n_elem);
        return out;
    }

    // ---------- DECISION FUNCTION ----------

    double decision_function(const arma::cx_rowvec &h_fs, const eigen_structure &r1_eig,
                             const eigen_structure &cf_eig, std::size_t n_t)
    {
        const std::size_t s = cf_eig.vectors.n_rows;
        if (h_fs.n_elem != n_t * s)
            throw std::invalid_argument("decision_function: stacked length mismatch");
        if (r1_eig.vectors.n_rows != n_t)
            throw std::invalid_argument("decision_function: spatial factor mismatch");
        if (r1_eig.rank() == 0 || cf_eig.rank() == 0)
            throw std::invalid_argument("decision_function: empty pseudo-spectrum");

        // The pseudo-inverses act through the asymptotic pseudo-spectrum:
        // the retained band carries equally distributed eigenvalues, so each
        // factor weighs its retained subspace by rank / captured trace. This
        // keeps E f(h_B) = rho1 * rho_f exactly and stays stable where the
        // exact transition-band eigenvalues would amplify spectral leakage.
        const double spatial_weight =
            double(r1_eig.rank()) / arma::accu(r1_eig.values);
        const double freq_weight =
            double(cf_eig.rank()) / arma::accu(cf_eig.values);

        arma::cx_mat m = arma::reshape(arma::cx_mat(h_fs.st()), s, n_t);
        arma::cx_mat g = cf_eig.vectors.t() * m * arma::conj(r1_eig.vectors);
        return arma::accu(arma::square(arma::abs(g))) * spatial_weight * freq_weight;
    }

    double delta_f(const estimation_result &est, const eigen_structure &r1_eig,
                   const eigen_structure &cf_eig, std::size_t n_t)
    {
        return decision_function(est.h_bob_fs, r1_eig, cf_eig, n_t) -
               decision_function(est.h_ava_fs, r1_eig, cf_eig, n_t);
    }

    double asymptotic_delta_f(const covariance_matrix &r1, const covariance_matrix &r2,
                              std::size_t taps)
    {
        // Tr(R_2 R-bar_1) through the asymptotic pseudo-spectrum: the band
        // projector scaled by rho1 / captured trace. r2 == r1 gives exactly
        // rho1 and a zero difference; disjoint supports leave only leakage.
        eigen_structure e1 = eigendecompose_hermitian(r1.entries);
        if (e1.rank() == 0)
            throw std::invalid_argument("asymptotic_delta_f: rank-zero covariance");
        double captured = 0.0, projected = 0.0;
        for (arma::uword a = 0; a < e1.rank(); a++)
        {
            captured += e1.values(a);
            projected += std::real(
                arma::cdot(e1.vectors.col(a), r2.entries * e1.vectors.col(a)));
        }
        const double trace_term = double(e1.rank()) * projected / captured;
        return double(taps) * (double(e1.rank()) - trace_term);
    }

    // ---------- ENHANCEMENT ----------

    identification_outcome enhance_identification(const identification_outcome &outcome,
                                                  double delta, double tol)
    {
        if (tol < 0.0)
            throw std::invalid_argument("enhance_identification: tolerance must be nonnegative");
        identification_outcome out = outcome;
        out.delta_f = delta;
        if (delta > tol)
        {
            out.status = identification_status::identified;
            out.chosen = hypothesis::h0;
        }
        else if (delta < -tol)
        {
            out.status = identification_status::identified;
            out.chosen = hypothesis::h1;
        }
        else
        {
            out.status = identification_status::error;
            out.chosen = hypothesis::none;
            out.iep_event = true;
        }
        return out;
    }
}
