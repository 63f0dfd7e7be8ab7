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

#include "iccsim/pilot_protocol.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "iccsim/common.hpp"
#include "iccsim/rng.hpp"

namespace iccsim
{
    // ---------- PHASE ALPHABET ----------

    phase_alphabet::phase_alphabet(std::size_t c_phi) : resolution(c_phi)
    {
        if (c_phi == 0)
            throw std::invalid_argument("phase_alphabet: resolution must be at least 1");
        phases.resize(c_phi);
        for (std::size_t m = 0; m < c_phi; m++)
            phases[m] = 2.0 * double(m) * pi / double(c_phi);
    }

    double phase_alphabet::phase(std::size_t m) const
    {
        if (m >= resolution)
            throw std::invalid_argument("phase_alphabet::phase: index out of range");
        return phases[m];
    }

    // ---------- PILOT SCHEDULE ----------

    double pilot_schedule::phase(std::size_t k) const
    {
        if (k >= symbols)
            throw std::invalid_argument("pilot_schedule::phase: symbol index out of range");
        return initial_phase + double(k) * phase_step;
    }

    std::complex<double> pilot_schedule::pilot(std::size_t k) const
    {
        return std::polar(amplitude, phase(k));
    }

    pilot_schedule build_schedule(const phase_alphabet &alphabet, rng &stream,
                                  double phase_step, double amplitude,
                                  std::size_t symbols)
    {
        if (symbols < 2)
            throw std::invalid_argument("build_schedule: need at least two training symbols");
        if (amplitude <= 0.0)
            throw std::invalid_argument("build_schedule: amplitude must be positive");
        pilot_schedule sched;
        sched.initial_phase_index = stream.uniform_int(alphabet.resolution);
        sched.initial_phase = alphabet.phase(sched.initial_phase_index);
        sched.phase_step = phase_step;
        sched.amplitude = amplitude;
        sched.symbols = symbols;
        return sched;
    }

    // ---------- SUBCARRIER ACTIVATION ----------

    std::vector<std::size_t> default_psi_b(std::size_t n_fft, std::size_t n_b,
                                           std::size_t offset)
    {
        if (n_b == 0 || n_b > n_fft)
            throw std::invalid_argument("default_psi_b: need 1 <= n_b <= n_fft");
        if (offset >= n_fft)
            throw std::invalid_argument("default_psi_b: offset out of range");
        std::vector<std::size_t> psi(n_b);
        for (std::size_t i = 0; i < n_b; i++)
            psi[i] = (offset + (i * n_fft) / n_b) % n_fft;
        std::sort(psi.begin(), psi.end());
        if (std::adjacent_find(psi.begin(), psi.end()) != psi.end())
            throw std::logic_error("default_psi_b: index collision");
        return psi;
    }

    sap codeword_to_sap(const codeword &w, const std::vector<std::size_t> &psi_b)
    {
        if (w.length() != psi_b.size())
            throw std::invalid_argument("codeword_to_sap: word length must match the pilot set");
        sap out;
        out.active.reserve(w.weight());
        for (std::size_t i = 0; i < w.length(); i++)
            if (w.bits[i])
                out.active.push_back(psi_b[i]);
        return out;
    }

    codeword sap_to_codeword(const sap &pattern, const std::vector<std::size_t> &psi_b)
    {
        codeword w;
        w.bits.assign(psi_b.size(), 0);
        for (auto sc : pattern.active)
        {
            auto it = std::lower_bound(psi_b.begin(), psi_b.end(), sc);
            if (it == psi_b.end() || *it != sc)
                throw std::invalid_argument("sap_to_codeword: active subcarrier outside the pilot set");
            w.bits[std::size_t(it - psi_b.begin())] = 1;
        }
        return w;
    }

    // ---------- PHASE-TO-CODEWORD MAP ----------

    codeword map_phase_to_codeword(std::size_t phase_index, const codebook &book,
                                   std::size_t resolution)
    {
        if (phase_index >= resolution)
            throw std::invalid_argument("map_phase_to_codeword: phase index out of range");
        if (book.count() < resolution)
            throw std::invalid_argument(
                "map_phase_to_codeword: codebook holds " + book.count().str() +
                " words but the alphabet needs " + std::to_string(resolution));
        return book.word_at(bigint(phase_index));
    }

    std::size_t demap_codeword_to_phase(const codeword &w, const codebook &book,
                                        std::size_t resolution)
    {
        bigint r = book.rank_of(w);
        if (r >= resolution)
            throw std::invalid_argument("demap_codeword_to_phase: word is outside the mapped range");
        return std::size_t(r);
    }
}
