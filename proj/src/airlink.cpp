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

#include "iccsim/airlink.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "iccsim/common.hpp"
#include "iccsim/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "grid serialization assumes a little-endian host");

namespace iccsim
{
    namespace
    {
        // Frequency response of every antenna on the listed subcarriers:
        // rows follow `rows`, columns follow antennas.
        arma::cx_mat frequency_response(const arma::cx_mat &cirs, std::size_t n_fft,
                                        const std::vector<std::size_t> &rows)
        {
            arma::uvec idx(rows.size());
            for (std::size_t i = 0; i < rows.size(); i++)
                idx(i) = arma::uword(rows[i]);
            dft_submatrix f = make_dft_submatrix(n_fft, cirs.n_cols, idx);
            return f.matrix * cirs.st();
        }

        sap resolve_sap(const attacker_config &attacker, const bob_transmit &bob,
                        rng &stream)
        {
            if (attacker.fixed_sap)
            {
                for (auto sc : attacker.fixed_sap->active)
                    if (!std::binary_search(bob.psi_b.begin(), bob.psi_b.end(), sc))
                        throw std::invalid_argument(
                            "transmit: fixed attacker pattern leaves the pilot set");
                return *attacker.fixed_sap;
            }

            switch (attacker.mode)
            {
            case attack_mode::silent:
                return sap{};
            case attack_mode::null_antenna:
                // Nulling acts on what Bob actually sends.
                return bob.pattern;
            case attack_mode::jam_wideband:
            {
                sap out;
                out.active = bob.psi_b;
                return out;
            }
            case attack_mode::jam_partial:
            {
                std::size_t victims = std::size_t(
                    std::lround(attacker.victim_fraction * double(bob.psi_b.size())));
                victims = std::clamp<std::size_t>(victims, 1, bob.psi_b.size());
                // Partial Fisher-Yates draw of `victims` distinct indices.
                std::vector<std::size_t> idx(bob.psi_b.size());
                for (std::size_t i = 0; i < idx.size(); i++)
                    idx[i] = i;
                for (std::size_t i = 0; i < victims; i++)
                {
                    std::size_t j = i + stream.uniform_int(idx.size() - i);
                    std::swap(idx[i], idx[j]);
                }
                sap out;
                out.active.reserve(victims);
                for (std::size_t i = 0; i < victims; i++)
                    out.active.push_back(bob.psi_b[idx[i]]);
                std::sort(out.active.begin(), out.active.end());
                return out;
            }
            case attack_mode::spoof:
                break;
            }

            switch (attacker.saps)
            {
            case sap_strategy::mimic_bob:
                return bob.pattern;
            case sap_strategy::random_codebook_word:
            {
                if (attacker.book == nullptr)
                    throw std::invalid_argument(
                        "transmit: random_codebook_word needs a codebook");
                return codeword_to_sap(random_word(*attacker.book, stream), bob.psi_b);
            }
            case sap_strategy::arbitrary_random_pattern:
            {
                sap out;
                do
                {
                    out.active.clear();
                    for (auto sc : bob.psi_b)
                        if (stream.uniform() < 0.5)
                            out.active.push_back(sc);
                } while (out.active.empty());
                return out;
            }
            }
            throw std::logic_error("transmit: unhandled attacker pattern strategy");
        }

        std::vector<double> resolve_phases(const attacker_config &attacker,
                                           const bob_transmit &bob, rng &stream)
        {
            const std::size_t symbols = bob.schedule.symbols;
            if (attacker.fixed_phases)
            {
                if (attacker.fixed_phases->size() != symbols)
                    throw std::invalid_argument(
                        "transmit: fixed attacker phases must cover every symbol");
                return *attacker.fixed_phases;
            }

            phase_alphabet alphabet(attacker.phase_resolution);
            std::vector<double> out(symbols, 0.0);
            switch (attacker.phases)
            {
            case phase_strategy::random_quantized:
                for (std::size_t k = 0; k < symbols; k++)
                    out[k] = alphabet.phase(stream.uniform_int(alphabet.resolution));
                return out;
            case phase_strategy::ramp_mimic:
            {
                double start = alphabet.phase(stream.uniform_int(alphabet.resolution));
                for (std::size_t k = 0; k < symbols; k++)
                    out[k] = start + double(k) * bob.schedule.phase_step;
                return out;
            }
            case phase_strategy::copy_bob:
                for (std::size_t k = 0; k < symbols; k++)
                    out[k] = bob.schedule.phase(k);
                return out;
            }
            throw std::logic_error("transmit: unhandled attacker phase strategy");
        }
    }

    received_grid transmit(const bob_transmit &bob, const attacker_config &attacker,
                           const channel_realization &channels, std::size_t n_fft,
                           double noise_var, rng &stream,
                           const std::vector<std::size_t> *noise_rows)
    {
        if (bob.psi_b.empty())
            throw std::invalid_argument("transmit: empty pilot set");
        if (!std::is_sorted(bob.psi_b.begin(), bob.psi_b.end()))
            throw std::invalid_argument("transmit: pilot set must be ascending");
        if (noise_var < 0.0)
            throw std::invalid_argument("transmit: noise variance must be nonnegative");
        for (auto sc : bob.pattern.active)
            if (!std::binary_search(bob.psi_b.begin(), bob.psi_b.end(), sc))
                throw std::invalid_argument("transmit: Bob's pattern leaves the pilot set");
        if (channels.bob_cirs.n_rows != channels.ava_cirs.n_rows ||
            channels.bob_cirs.n_cols != channels.ava_cirs.n_cols)
            throw std::invalid_argument("transmit: channel dimensions disagree");

        const std::size_t n_t = channels.bob_cirs.n_rows;
        const std::size_t symbols = bob.schedule.symbols;

        received_grid grid;
        grid.n_fft = n_fft;
        grid.noise_var = noise_var;
        grid.truth.channels = channels;
        grid.truth.psi_b = bob.psi_b;
        grid.truth.bob_sap = bob.pattern;
        grid.truth.bob_amplitude = bob.schedule.amplitude;
        grid.truth.bob_phases.resize(symbols);
        for (std::size_t k = 0; k < symbols; k++)
            grid.truth.bob_phases[k] = bob.schedule.phase(k);

        // Attacker randomness is drawn before the channel noise so a given
        // stream yields the same attack plan regardless of grid size.
        const bool active_attacker = attacker.mode != attack_mode::silent;
        sap ava_sap;
        std::vector<double> ava_phases;
        if (active_attacker)
        {
            ava_sap = resolve_sap(attacker, bob, stream);
            if (attacker.mode != attack_mode::null_antenna)
                ava_phases = resolve_phases(attacker, bob, stream);
        }
        grid.truth.ava_sap = ava_sap;
        grid.truth.ava_phases = ava_phases;
        grid.truth.ava_amplitude = active_attacker ? std::sqrt(attacker.power) : 0.0;

        if (noise_rows)
            for (auto r : *noise_rows)
                if (r >= n_fft)
                    throw std::invalid_argument("transmit: noise row outside the grid");

        grid.samples.set_size(n_fft, n_t, symbols);
        const double noise_scale = std::sqrt(noise_var);
        if (noise_rows)
        {
            grid.samples.zeros();
            for (std::size_t k = 0; k < symbols; k++)
                for (std::size_t i = 0; i < n_t; i++)
                    for (auto r : *noise_rows)
                        grid.samples(r, i, k) = noise_scale * stream.cgaussian();
        }
        else
        {
            for (std::size_t k = 0; k < symbols; k++)
                grid.samples.slice(k) = noise_scale * stream.cgaussian_mat(n_fft, n_t);
        }

        // Bob's contribution.
        arma::cx_mat gb = frequency_response(channels.bob_cirs, n_fft,
                                             bob.pattern.active);
        for (std::size_t k = 0; k < symbols; k++)
        {
            std::complex<double> xb = bob.schedule.pilot(k);
            for (std::size_t r = 0; r < bob.pattern.active.size(); r++)
                grid.samples.slice(k).row(bob.pattern.active[r]) += xb * gb.row(r);
        }

        if (!active_attacker || ava_sap.active.empty())
            return grid;

        // Ava's contribution.
        arma::cx_mat ga = frequency_response(channels.ava_cirs, n_fft,
                                             ava_sap.active);
        arma::cx_mat values(ava_sap.active.size(), symbols);
        if (attacker.mode == attack_mode::null_antenna)
        {
            // Cancel the first antenna's pilot observation exactly:
            // a_k[n] = -x_b,k g_b^1[n] / g_a^1[n] on Bob's pattern.
            arma::cx_mat gb1 = frequency_response(channels.bob_cirs.row(0), n_fft,
                                                  ava_sap.active);
            for (std::size_t r = 0; r < ava_sap.active.size(); r++)
            {
                std::complex<double> ga1 = ga(r, 0);
                if (std::abs(ga1) < 1e-300)
                    throw std::runtime_error("transmit: nulling hit a zero response");
                for (std::size_t k = 0; k < symbols; k++)
                    values(r, k) = -bob.schedule.pilot(k) * gb1(r, 0) / ga1;
            }
        }
        else
        {
            double amp = std::sqrt(attacker.power);
            for (std::size_t k = 0; k < symbols; k++)
                values.col(k).fill(std::polar(amp, ava_phases[k]));
        }
        grid.truth.ava_values = values;

        for (std::size_t k = 0; k < symbols; k++)
            for (std::size_t r = 0; r < ava_sap.active.size(); r++)
                grid.samples.slice(k).row(ava_sap.active[r]) += values(r, k) * ga.row(r);
        return grid;
    }

    arma::cx_mat ls_baseline_estimate(const received_grid &grid,
                                      const pilot_schedule &assumed,
                                      const std::vector<std::size_t> &psi_b,
                                      std::size_t l)
    {
        const std::size_t n_t = grid.samples.n_cols;
        const std::size_t symbols = grid.samples.n_slices;
        if (symbols == 0 || psi_b.empty())
            throw std::invalid_argument("ls_baseline_estimate: empty grid or pilot set");

        // Symbol-averaged derotation: z[n, i] = mean_k y_k[n, i] / x_k.
        arma::cx_mat z(psi_b.size(), n_t, arma::fill::zeros);
        for (std::size_t k = 0; k < std::min(symbols, assumed.symbols); k++)
        {
            std::complex<double> x = assumed.pilot(k);
            for (std::size_t r = 0; r < psi_b.size(); r++)
                z.row(r) += grid.samples.slice(k).row(psi_b[r]) / x;
        }
        z /= double(std::min(symbols, assumed.symbols));

        arma::uvec idx(psi_b.size());
        for (std::size_t i = 0; i < psi_b.size(); i++)
            idx(i) = arma::uword(psi_b[i]);
        dft_submatrix f = make_dft_submatrix(grid.n_fft, l, idx);
        arma::cx_mat f_pinv = arma::pinv(f.matrix);
        return (f_pinv * z).st(); // n_t x l
    }

    // ---------- GRID SERIALIZATION ----------

    namespace
    {
        void put_u32(std::ostream &os, std::uint32_t v)
        {
            char b[4];
            std::memcpy(b, &v, 4);
            os.write(b, 4);
        }

        std::uint32_t get_u32(std::istream &is)
        {
            char b[4];
            is.read(b, 4);
            std::uint32_t v;
            std::memcpy(&v, b, 4);
            return v;
        }
    }

    void write_grid(const received_grid &grid, std::ostream &os)
    {
        os.write("ICCGRID1", 8);
        put_u32(os, std::uint32_t(grid.n_fft));
        put_u32(os, std::uint32_t(grid.samples.n_cols));
        put_u32(os, std::uint32_t(grid.samples.n_slices));
        const char pad[12] = {};
        os.write(pad, 12);

        // Cube memory order already matches the declared layout.
        const std::size_t n = grid.samples.n_elem;
        for (std::size_t i = 0; i < n; i++)
        {
            float re = float(grid.samples.mem[i].real());
            float im = float(grid.samples.mem[i].imag());
            char b[8];
            std::memcpy(b, &re, 4);
            std::memcpy(b + 4, &im, 4);
            os.write(b, 8);
        }
        if (!os)
            throw std::runtime_error("write_grid: stream failure");
    }

    void write_grid(const received_grid &grid, const std::string &path)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw std::runtime_error("write_grid: cannot open " + path);
        write_grid(grid, os);
    }

    grid_dump read_grid(std::istream &is)
    {
        char magic[8];
        is.read(magic, 8);
        if (!is || std::memcmp(magic, "ICCGRID1", 8) != 0)
            throw std::runtime_error("read_grid: bad magic");
        grid_dump out;
        out.n_fft = get_u32(is);
        out.n_t = get_u32(is);
        out.symbols = get_u32(is);
        char pad[12];
        is.read(pad, 12);
        if (!is)
            throw std::runtime_error("read_grid: truncated header");

        out.samples.set_size(out.n_fft, out.n_t, out.symbols);
        for (std::size_t i = 0; i < out.samples.n_elem; i++)
        {
            char b[8];
            is.read(b, 8);
            if (!is)
                throw std::runtime_error("read_grid: truncated payload");
            float re, im;
            std::memcpy(&re, b, 4);
            std::memcpy(&im, b + 4, 4);
            out.samples(i) = std::complex<double>(re, im);
        }
        return out;
    }

    grid_dump read_grid(const std::string &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw std::runtime_error("read_grid: cannot open " + path);
        return read_grid(is);
    }
}
