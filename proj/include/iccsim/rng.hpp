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

#ifndef iccsim_rng_H
#define iccsim_rng_H

#include <armadillo>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace iccsim
{
    // Deterministic random stream. Streams are derived from
    // (master seed, trial index, stream id) through a splitmix64 mix, so any
    // trial of any experiment owns an independent generator regardless of
    // scheduling order. Gaussian sampling is done with an explicit Box-Muller
    // transform; std::normal_distribution is implementation-defined and would
    // break byte-identical reproducibility across standard libraries.
    class rng
    {
    public:
        explicit rng(std::uint64_t key) : gen(key) {}

        // Counter-derived stream for one trial of one experiment.
        static rng for_trial(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t stream)
        {
            std::uint64_t k = mix(mix(mix(0x9e3779b97f4a7c15ULL ^ master_seed) + trial) + stream);
            return rng(k);
        }

        static std::uint64_t mix(std::uint64_t z)
        {
            z += 0x9e3779b97f4a7c15ULL;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        }

        std::uint64_t next_u64() { return gen(); }

        // Uniform double in [0, 1) with 53-bit resolution.
        double uniform() { return double(gen() >> 11) * 0x1.0p-53; }

        double uniform(double a, double b) { return a + (b - a) * uniform(); }

        // Unbiased integer in [0, n) by rejection.
        std::uint64_t uniform_int(std::uint64_t n)
        {
            if (n == 0)
                return 0;
            std::uint64_t threshold = (~n + 1) % n; // 2^64 mod n
            for (;;)
            {
                std::uint64_t r = gen();
                if (r >= threshold)
                    return r % n;
            }
        }

        // Standard normal via Box-Muller; computes pairs, caches the spare.
        double gaussian()
        {
            if (have_spare)
            {
                have_spare = false;
                return spare;
            }
            double u1 = uniform();
            double u2 = uniform();
            // u1 = 0 would take log(0); the smallest representable draw is fine.
            double r = std::sqrt(-2.0 * std::log(u1 + 0x1.0p-54));
            double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
            spare = r * std::sin(a);
            have_spare = true;
            return r * std::cos(a);
        }

        // Circularly-symmetric complex normal CN(0, 1).
        std::complex<double> cgaussian()
        {
            double u1 = uniform();
            double u2 = uniform();
            double r = std::sqrt(-std::log(u1 + 0x1.0p-54)); // variance 1/2 per part
            double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
            return {r * std::cos(a), r * std::sin(a)};
        }

        arma::cx_vec cgaussian_vec(arma::uword n)
        {
            arma::cx_vec v(n);
            for (arma::uword i = 0; i < n; i++)
                v[i] = cgaussian();
            return v;
        }

        arma::cx_mat cgaussian_mat(arma::uword rows, arma::uword cols)
        {
            arma::cx_mat m(rows, cols);
            for (arma::uword c = 0; c < cols; c++)
                for (arma::uword r = 0; r < rows; r++)
                    m(r, c) = cgaussian();
            return m;
        }

    private:
        std::mt19937_64 gen;
        bool have_spare = false;
        double spare = 0.0;
    };
}

#endif
