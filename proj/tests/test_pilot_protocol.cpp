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

#include <cmath>
#include <complex>
#include <vector>

#include "iccsim/common.hpp"
#include "iccsim/pilot_protocol.hpp"
#include "iccsim/rng.hpp"
#include "test_support.hpp"

using namespace iccsim;
using cx = std::complex<double>;

static void test_phase_alphabet()
{
    phase_alphabet a(8);
    CHECK(a.resolution == 8);
    CHECK(a.phases.size() == 8);
    for (std::size_t m = 0; m < 8; m++)
        CHECK(std::abs(a.phase(m) - 2.0 * double(m) * pi / 8.0) <= 1e-15);
    CHECK_THROWS(a.phase(8), std::invalid_argument);
    CHECK_THROWS(phase_alphabet(0), std::invalid_argument);

    phase_alphabet b(4);
    CHECK(std::abs(b.phase(3) - 3.0 * pi / 2.0) <= 1e-15);
}

static void test_schedule()
{
    phase_alphabet a(8);
    rng stream(3);
    pilot_schedule s = build_schedule(a, stream, pi / 2.0, std::sqrt(2.0), 3);
    CHECK(s.symbols == 3);
    CHECK(s.phase_step == pi / 2.0);
    CHECK(s.initial_phase_index < 8);
    CHECK(std::abs(s.initial_phase - a.phase(s.initial_phase_index)) <= 1e-15);

    // Pilot values: amplitude sqrt(rho), phase ramping by phi_bar per symbol.
    for (std::size_t k = 0; k < 3; k++)
    {
        cx want = std::polar(std::sqrt(2.0), s.initial_phase + double(k) * pi / 2.0);
        CHECK(std::abs(s.pilot(k) - want) <= 1e-14);
        CHECK(std::abs(std::abs(s.pilot(k)) - std::sqrt(2.0)) <= 1e-14);
    }
    // Adjacent-symbol differential is exactly the public ramp increment.
    for (std::size_t k = 0; k + 1 < 3; k++)
    {
        double diff = std::arg(s.pilot(k + 1) * std::conj(s.pilot(k)));
        CHECK(std::abs(wrap_angle(diff - pi / 2.0)) <= 1e-12);
    }
    CHECK_THROWS(s.phase(3), std::invalid_argument);
    CHECK_THROWS(build_schedule(a, stream, pi / 2.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS(build_schedule(a, stream, pi / 2.0, 0.0, 2), std::invalid_argument);

    // The initial offset is drawn uniformly from the alphabet: chi-square
    // over 8 cells, 8000 draws, far below the 99.9% quantile (24.3).
    int counts[8] = {0};
    rng u(17);
    for (int t = 0; t < 8000; t++)
    {
        pilot_schedule d = build_schedule(a, u, pi / 2.0, 1.0, 2);
        counts[d.initial_phase_index]++;
    }
    double chi2 = 0.0;
    for (int m = 0; m < 8; m++)
    {
        double dlt = double(counts[m]) - 1000.0;
        chi2 += dlt * dlt / 1000.0;
    }
    CHECK_MSG(chi2 < 24.3, "chi2 = " + std::to_string(chi2));
}

static void test_default_psi_b()
{
    // Divisible case: exact arithmetic progression.
    std::vector<std::size_t> psi = default_psi_b(32, 8);
    CHECK(psi.size() == 8);
    for (std::size_t i = 0; i < 8; i++)
        CHECK(psi[i] == 4 * i);

    // Offset shifts every index.
    std::vector<std::size_t> shifted = default_psi_b(32, 8, 2);
    for (std::size_t i = 0; i < 8; i++)
        CHECK(shifted[i] == 2 + 4 * i);

    // Non-divisible grids stay sorted, distinct, in range.
    std::vector<std::size_t> odd = default_psi_b(20, 7);
    CHECK(odd.size() == 7);
    for (std::size_t i = 0; i + 1 < odd.size(); i++)
        CHECK(odd[i] < odd[i + 1]);
    CHECK(odd.back() < 20);

    // Dense case n_b = n_fft covers the whole grid.
    std::vector<std::size_t> dense = default_psi_b(9, 9);
    for (std::size_t i = 0; i < 9; i++)
        CHECK(dense[i] == i);

    CHECK_THROWS(default_psi_b(8, 9), std::invalid_argument);
    CHECK_THROWS(default_psi_b(8, 0), std::invalid_argument);
    CHECK_THROWS(default_psi_b(8, 4, 8), std::invalid_argument);
}

static void test_sap_round_trip()
{
    std::vector<std::size_t> psi = default_psi_b(32, 12);
    codebook book(12, 4);
    rng stream(5);
    for (int t = 0; t < 50; t++)
    {
        codeword w = random_word(book, stream);
        sap pattern = codeword_to_sap(w, psi);
        CHECK(pattern.size() == w.weight());
        // Active indices are exactly the psi positions of the one digits.
        std::size_t j = 0;
        for (std::size_t i = 0; i < w.length(); i++)
            if (w.bits[i])
            {
                CHECK(pattern.active[j] == psi[i]);
                j++;
            }
        CHECK(sap_to_codeword(pattern, psi) == w);
    }
    // Length mismatch is rejected.
    codeword short_word = codeword_from_string("1110");
    CHECK_THROWS(codeword_to_sap(short_word, psi), std::invalid_argument);
}

static void test_phase_codeword_map()
{
    // Injective by construction: index m -> rank m.
    codebook book(12, 4);
    std::vector<codeword> seen;
    for (std::size_t m = 0; m < 8; m++)
    {
        codeword w = map_phase_to_codeword(m, book, 8);
        CHECK(w == book.word_at(bigint(m)));
        for (const codeword &prev : seen)
            CHECK(w != prev);
        seen.push_back(w);
        CHECK(demap_codeword_to_phase(w, book, 8) == m);
    }
    CHECK_THROWS(map_phase_to_codeword(8, book, 8), std::invalid_argument);

    // A word outside the mapped range cannot demap.
    codeword outside = book.word_at(bigint(20));
    CHECK_THROWS(demap_codeword_to_phase(outside, book, 8), std::invalid_argument);

    // A book smaller than the alphabet cannot host the map.
    codebook tiny(4, 2); // four words only
    CHECK_THROWS(map_phase_to_codeword(0, tiny, 8), std::invalid_argument);
}

int main()
{
    test_phase_alphabet();
    test_schedule();
    test_default_psi_b();
    test_sap_round_trip();
    test_phase_codeword_map();
    return testsup::summary("test_pilot_protocol");
}
