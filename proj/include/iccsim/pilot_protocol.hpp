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

#ifndef iccsim_pilot_protocol_H
#define iccsim_pilot_protocol_H

#include <complex>
#include <cstdint>
#include <vector>

#include "iccsim/icc_code.hpp"

namespace iccsim
{
    class rng;

    // ---------- PHASE ALPHABET ----------

    // C_phi equally spaced offsets 2 m pi / C_phi, m = 0 .. C_phi - 1.
    struct phase_alphabet
    {
        std::size_t resolution = 8;

        explicit phase_alphabet(std::size_t c_phi = 8);

        std::vector<double> phases; // phases[m] = 2 m pi / resolution
        double phase(std::size_t m) const;
    };

    // ---------- PILOT SCHEDULE ----------

    // Bob's per-symbol pilot value on an active subcarrier: amplitude
    // sqrt(rho_b), phase = initial offset + k * phase_step for symbol k.
    struct pilot_schedule
    {
        std::size_t initial_phase_index = 0; // index into the alphabet
        double initial_phase = 0.0;
        double phase_step = 0.0; // the public ramp increment phi_bar
        double amplitude = 1.0;  // sqrt(rho_b)
        std::size_t symbols = 2;

        std::complex<double> pilot(std::size_t k) const; // symbol k in [0, symbols)
        double phase(std::size_t k) const;
    };

    // Random initial offset from the alphabet; the ramp and amplitude are
    // public protocol constants.
    pilot_schedule build_schedule(const phase_alphabet &alphabet, rng &stream,
                                  double phase_step, double amplitude,
                                  std::size_t symbols);

    // ---------- SUBCARRIER ACTIVATION ----------

    // A subcarrier activation pattern: the active members of the pilot set.
    struct sap
    {
        std::vector<std::size_t> active; // ascending subcarrier indices
        std::size_t size() const { return active.size(); }
    };

    // The designated pilot subcarrier set Psi_B: n_b indices equally spaced
    // over an n_fft grid, starting at offset.
    std::vector<std::size_t> default_psi_b(std::size_t n_fft, std::size_t n_b,
                                           std::size_t offset = 0);

    // Codeword digit i governs psi_b[i]; ones are activated.
    sap codeword_to_sap(const codeword &w, const std::vector<std::size_t> &psi_b);
    codeword sap_to_codeword(const sap &pattern, const std::vector<std::size_t> &psi_b);

    // ---------- PHASE-TO-CODEWORD MAP ----------

    // The secret map from the drawn phase index to a codebook word. Injective
    // by construction: index m maps to rank m, which requires count >= C_phi.
    codeword map_phase_to_codeword(std::size_t phase_index, const codebook &book,
                                   std::size_t resolution);
    std::size_t demap_codeword_to_phase(const codeword &w, const codebook &book,
                                        std::size_t resolution);
}

#endif
