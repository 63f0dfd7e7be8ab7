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

#ifndef iccsim_airlink_H
#define iccsim_airlink_H

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <armadillo>

#include "iccsim/channel_model.hpp"
#include "iccsim/pilot_protocol.hpp"

namespace iccsim
{
    class rng;

    // ---------- ATTACKER ----------

    enum class attack_mode
    {
        silent,       // no attacker signal
        spoof,        // pilot-tone spoofing: a pilot of Ava's own on her pattern
        null_antenna, // genie nulling of the first antenna's pilot observation
        jam_wideband, // random-phase tone on every designated pilot subcarrier
        jam_partial   // random-phase tone on a random victim subset
    };

    enum class sap_strategy
    {
        mimic_bob,               // copy Bob's activation pattern exactly
        random_codebook_word,    // uniform word from the codebook (needs book)
        arbitrary_random_pattern // uniform nonempty subset of the pilot set
    };

    enum class phase_strategy
    {
        random_quantized, // fresh alphabet draw every symbol
        ramp_mimic,       // random alphabet start, then the public ramp
        copy_bob          // Bob's phases exactly
    };

    struct attacker_config
    {
        attack_mode mode = attack_mode::silent;
        double power = 1.0;           // rho_a, per-subcarrier pilot power
        double victim_fraction = 0.5; // jam_partial: share of the pilot set hit
        sap_strategy saps = sap_strategy::mimic_bob;
        phase_strategy phases = phase_strategy::copy_bob;
        std::size_t phase_resolution = 8;    // alphabet size for random draws
        const codebook *book = nullptr;      // for random_codebook_word
        std::optional<sap> fixed_sap;        // overrides the sap strategy
        std::optional<std::vector<double>> fixed_phases; // overrides the phase strategy
    };

    // ---------- TRANSMISSION ----------

    struct bob_transmit
    {
        pilot_schedule schedule;
        sap pattern;                    // Bob's activation, subset of psi_b
        std::vector<std::size_t> psi_b; // designated pilot subcarriers, ascending
    };

    // Ground truth recorded alongside the synthesized grid for genie-aided
    // receivers and tests.
    struct grid_truth
    {
        channel_realization channels;
        std::vector<std::size_t> psi_b;
        sap bob_sap, ava_sap;
        std::vector<double> bob_phases, ava_phases; // one entry per symbol
        double bob_amplitude = 1.0;
        double ava_amplitude = 0.0;
        // Ava's transmitted value per (active subcarrier, symbol); empty when
        // silent. Row r matches ava_sap.active[r].
        arma::cx_mat ava_values;
    };

    struct received_grid
    {
        arma::cx_cube samples; // n_fft x n_t x symbols
        std::size_t n_fft = 0;
        double noise_var = 0.0;
        grid_truth truth;
    };

    // Frequency-domain synthesis over the full grid: on subcarrier n of
    // symbol k the antenna-i sample is
    //   x_b,k 1[n in bob sap] g_b^i[n] + a_k[n] 1[n in ava sap] g_a^i[n] + w,
    // with g^i[n] the L-tap DFT response and w white CN(0, noise_var).
    // A non-null noise_rows restricts the noise to those subcarriers (the
    // rest stay noiseless); a consumer that only reads the listed rows sees
    // the same statistics as on a fully noisy grid at a fraction of the
    // synthesis cost. The attack plan and the noise on the listed rows do
    // not depend on the restriction set's complement.
    received_grid transmit(const bob_transmit &bob, const attacker_config &attacker,
                           const channel_realization &channels, std::size_t n_fft,
                           double noise_var, rng &stream,
                           const std::vector<std::size_t> *noise_rows = nullptr);

    // ---------- CONVENTIONAL BASELINE ----------

    // Least-squares channel estimate of a receiver that assumes the
    // deterministic schedule on the full pilot set: per antenna,
    // pinv(F) applied to the symbol-averaged derotated observations.
    arma::cx_mat ls_baseline_estimate(const received_grid &grid,
                                      const pilot_schedule &assumed,
                                      const std::vector<std::size_t> &psi_b,
                                      std::size_t l);

    // ---------- GRID SERIALIZATION ----------

    // Binary layout: 8-byte magic "ICCGRID1", three little-endian uint32
    // (n_fft, n_t, symbols), zero padding to a 32-byte header, then the cube
    // as little-endian complex64, subcarrier index fastest, then antenna,
    // then symbol.
    void write_grid(const received_grid &grid, std::ostream &os);
    void write_grid(const received_grid &grid, const std::string &path);

    struct grid_dump
    {
        std::size_t n_fft = 0, n_t = 0, symbols = 0;
        arma::cx_cube samples; // promoted to double precision on load
    };
    grid_dump read_grid(std::istream &is);
    grid_dump read_grid(const std::string &path);
}

#endif
