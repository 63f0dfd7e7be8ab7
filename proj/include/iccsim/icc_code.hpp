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

#ifndef iccsim_icc_code_H
#define iccsim_icc_code_H

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace iccsim
{
    class rng;

    using bigint = boost::multiprecision::cpp_int;

    // ---------- CODEWORDS ----------

    struct codeword
    {
        std::vector<std::uint8_t> bits; // one entry per position, values 0/1

        std::size_t length() const { return bits.size(); }
        std::size_t weight() const;
        // Positions packed into a mask, bit i = position i. Length <= 64 only.
        std::uint64_t mask() const;

        bool operator==(const codeword &o) const { return bits == o.bits; }
        bool operator!=(const codeword &o) const { return bits != o.bits; }
    };

    // Digit-by-digit Boolean sum: z_i = 0 iff x_i = y_i = 0.
    codeword superpose(const codeword &x, const codeword &y);

    std::size_t overlap_ones(const codeword &x, const codeword &y);

    std::string to_string(const codeword &w);
    codeword codeword_from_string(const std::string &s);

    // ---------- CODEBOOK ----------

    // The constant-weight code of length n_b and order s: every word has
    // weight w = (n_b + s) / 2, every pair of words shares at least s one
    // positions, and the bound 2w - n_b = s is attained. Words are ordered by
    // the lexicographic order of their sorted position tuples, so rank 0 is
    // 11...10...0. Small books are materialized; larger ones are served
    // through rank/unrank.
    class codebook
    {
    public:
        codebook(std::size_t n_b, std::size_t s);

        std::size_t length() const { return n_b_; }
        std::size_t order() const { return s_; }
        std::size_t weight() const { return w_; }
        const bigint &count() const { return count_; }
        bool materialized() const { return !words_.empty() || count_ == 0; }
        const std::vector<codeword> &words() const; // materialized books only

        codeword word_at(const bigint &rank) const;
        bigint rank_of(const codeword &w) const;

        // Membership; for the complete constant-weight code this is the
        // weight test plus a length check.
        bool contains(const codeword &w) const;

        // Text export: header line "icc <N_B> <s>", then one word per line.
        void write_text(std::ostream &os) const;

    private:
        std::size_t n_b_, s_, w_;
        bigint count_;
        std::vector<codeword> words_;
    };

    // Books at or below this word count are materialized (memory guard; the
    // stated n_b <= 28 limit alone would admit tens of millions of words).
    inline constexpr std::size_t codebook_materialize_limit = 1u << 20;

    // ---------- VERIFICATION ----------

    struct icc_check
    {
        bool ok = false;
        std::size_t min_overlap = 0;
        std::optional<std::pair<std::size_t, std::size_t>> witness; // offending pair
    };

    // Materialized books: exhaustive pair scan. Rank/unrank views: analytic
    // bound 2w - n_b plus 10^4 random pairs.
    icc_check verify_icc(const codebook &book, std::uint64_t seed = 1);

    // Uniform draw over the whole book, rejection-sampled over ranks.
    codeword random_word(const codebook &book, rng &stream);

    // Same scan over an explicit word list (for injected-defect tests).
    icc_check verify_words(const std::vector<codeword> &words, std::size_t n_b, std::size_t s);

    // ---------- RATE AND RELIABILITY ----------

    // log2(binomial(n_b, (n_b + s)/2)) / n_b, exact binomial before the log.
    double code_rate(std::size_t n_b, std::size_t s);

    // Identification error probability report. Exact rational plus doubles.
    struct iep_report
    {
        std::size_t n_b = 0, l = 0;
        std::uint64_t k = 1;
        bigint numerator;   // exact rational numerator
        bigint denominator; // exact rational denominator
        double p_i = 0.0;
        double p_i_dpd = 0.0;
        bool cpd_zero = false; // continuous mean-AoA case: exactly zero
    };

    // p_i = (binomial(n_b, (n_b + l)/2) - 1) / 2^(n_b + 1). Evaluated in exact
    // integers through two algebraically equal routes (binomial form and
    // factorial form) which are asserted to agree.
    iep_report theoretical_iep(std::size_t n_b, std::size_t l);

    // Discrete mean-AoA distribution over k points divides the IEP by k.
    iep_report dpd_adjust(const iep_report &r, std::uint64_t k);

    // Continuous mean-AoA distribution: the error event has probability zero.
    iep_report cpd_adjust(const iep_report &r);

    // Exact binomial coefficient.
    bigint binomial(std::size_t n, std::size_t k);
}

#endif
