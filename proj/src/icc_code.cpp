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

#include "iccsim/icc_code.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "iccsim/rng.hpp"

namespace iccsim
{
    using bigfloat = boost::multiprecision::cpp_bin_float_100;

    // ---------- CODEWORD BASICS ----------

    std::size_t codeword::weight() const
    {
        std::size_t w = 0;
        for (auto b : bits)
            w += (b != 0);
        return w;
    }

    std::uint64_t codeword::mask() const
    {
        if (bits.size() > 64)
            throw std::invalid_argument("codeword::mask: length exceeds 64");
        std::uint64_t m = 0;
        for (std::size_t i = 0; i < bits.size(); i++)
            if (bits[i])
                m |= (1ULL << i);
        return m;
    }

    codeword superpose(const codeword &x, const codeword &y)
    {
        if (x.length() != y.length())
            throw std::invalid_argument("superpose: length mismatch");
        codeword z;
        z.bits.resize(x.length());
        for (std::size_t i = 0; i < x.length(); i++)
            z.bits[i] = (x.bits[i] || y.bits[i]) ? 1 : 0;
        return z;
    }

    std::size_t overlap_ones(const codeword &x, const codeword &y)
    {
        if (x.length() != y.length())
            throw std::invalid_argument("overlap_ones: length mismatch");
        std::size_t n = 0;
        for (std::size_t i = 0; i < x.length(); i++)
            n += (x.bits[i] && y.bits[i]);
        return n;
    }

    std::string to_string(const codeword &w)
    {
        std::string s(w.length(), '0');
        for (std::size_t i = 0; i < w.length(); i++)
            if (w.bits[i])
                s[i] = '1';
        return s;
    }

    codeword codeword_from_string(const std::string &s)
    {
        codeword w;
        w.bits.reserve(s.size());
        for (char c : s)
        {
            if (c != '0' && c != '1')
                throw std::invalid_argument("codeword_from_string: characters must be 0 or 1");
            w.bits.push_back(c == '1' ? 1 : 0);
        }
        return w;
    }

    // ---------- COMBINATORICS ----------

    bigint binomial(std::size_t n, std::size_t k)
    {
        if (k > n)
            return 0;
        if (k > n - k)
            k = n - k;
        bigint r = 1;
        for (std::size_t i = 0; i < k; i++)
        {
            r *= bigint(n - i);
            r /= bigint(i + 1);
        }
        return r;
    }

    // ---------- CODEBOOK ----------

    codebook::codebook(std::size_t n_b, std::size_t s) : n_b_(n_b), s_(s)
    {
        if (s == 0)
            throw std::invalid_argument("codebook: order must be at least 1");
        if (n_b < s)
            throw std::invalid_argument("codebook: length must be at least the order");
        if ((n_b + s) % 2 != 0)
            throw std::invalid_argument("codebook: n_b + s must be even so the weight is an integer");

        w_ = (n_b + s) / 2;
        count_ = binomial(n_b, w_);

        if (n_b <= 28 && count_ <= codebook_materialize_limit)
        {
            // Enumerate weight-w position tuples in lexicographic order.
            std::vector<std::size_t> pos(w_);
            for (std::size_t i = 0; i < w_; i++)
                pos[i] = i;
            words_.reserve(std::size_t(count_));
            for (;;)
            {
                codeword w;
                w.bits.assign(n_b, 0);
                for (auto p : pos)
                    w.bits[p] = 1;
                words_.push_back(std::move(w));

                // Next tuple: advance the rightmost position that can move.
                std::size_t i = w_;
                while (i > 0)
                {
                    i--;
                    if (pos[i] != i + n_b - w_)
                    {
                        pos[i]++;
                        for (std::size_t j = i + 1; j < w_; j++)
                            pos[j] = pos[j - 1] + 1;
                        i = w_ + 1;
                        break;
                    }
                }
                if (i != w_ + 1)
                    break;
            }
        }
    }

    const std::vector<codeword> &codebook::words() const
    {
        if (words_.empty() && count_ != 0)
            throw std::logic_error("codebook::words: book is not materialized");
        return words_;
    }

    codeword codebook::word_at(const bigint &rank) const
    {
        if (rank < 0 || rank >= count_)
            throw std::invalid_argument("codebook::word_at: rank out of range");
        if (!words_.empty())
            return words_[std::size_t(rank)];

        // Lexicographic unrank over position tuples. Walking positions left to
        // right: placing a one at position p consumes binomial(n_b - p - 1,
        // remaining - 1) ranks for each earlier choice skipped.
        codeword w;
        w.bits.assign(n_b_, 0);
        bigint rem = rank;
        std::size_t need = w_;
        for (std::size_t p = 0; p < n_b_ && need > 0; p++)
        {
            bigint block = binomial(n_b_ - p - 1, need - 1);
            if (rem < block)
            {
                w.bits[p] = 1;
                need--;
            }
            else
                rem -= block;
        }
        return w;
    }

    bigint codebook::rank_of(const codeword &w) const
    {
        if (w.length() != n_b_ || w.weight() != w_)
            throw std::invalid_argument("codebook::rank_of: word is not in this book");
        bigint rank = 0;
        std::size_t need = w_;
        for (std::size_t p = 0; p < n_b_ && need > 0; p++)
        {
            if (w.bits[p])
            {
                need--;
                continue;
            }
            rank += binomial(n_b_ - p - 1, need - 1);
        }
        return rank;
    }

    bool codebook::contains(const codeword &w) const
    {
        return w.length() == n_b_ && w.weight() == w_;
    }

    void codebook::write_text(std::ostream &os) const
    {
        os << "icc " << n_b_ << " " << s_ << "\n";
        if (!words_.empty())
        {
            for (const auto &w : words_)
                os << to_string(w) << "\n";
            return;
        }
        for (bigint r = 0; r < count_; r++)
            os << to_string(word_at(r)) << "\n";
    }

    // ---------- VERIFICATION ----------

    icc_check verify_words(const std::vector<codeword> &words, std::size_t n_b, std::size_t s)
    {
        icc_check out;
        out.min_overlap = n_b;
        const std::size_t w = (n_b + s) / 2;

        for (std::size_t i = 0; i < words.size(); i++)
        {
            if (words[i].length() != n_b || words[i].weight() != w)
            {
                out.ok = false;
                out.min_overlap = 0;
                out.witness = std::make_pair(i, i);
                return out;
            }
        }

        const bool small = n_b <= 64;
        std::vector<std::uint64_t> masks;
        if (small)
        {
            masks.reserve(words.size());
            for (const auto &wd : words)
                masks.push_back(wd.mask());
        }

        for (std::size_t i = 0; i < words.size(); i++)
            for (std::size_t j = i + 1; j < words.size(); j++)
            {
                std::size_t ov = small
                                     ? std::size_t(__builtin_popcountll(masks[i] & masks[j]))
                                     : overlap_ones(words[i], words[j]);
                if (ov < out.min_overlap)
                {
                    out.min_overlap = ov;
                    if (ov < s)
                    {
                        out.ok = false;
                        out.witness = std::make_pair(i, j);
                        return out;
                    }
                }
            }

        if (words.size() < 2)
            out.min_overlap = w; // a single word overlaps itself fully
        out.ok = out.min_overlap >= s;
        return out;
    }

    codeword random_word(const codebook &book, rng &stream)
    {
        // The book holds every weight-w word, so a uniform w-subset of the
        // positions is a uniform codeword. Partial Fisher-Yates; cost O(n_b)
        // regardless of the count, which can exceed any machine integer.
        const std::size_t n = book.length(), w = book.weight();
        std::vector<std::size_t> pos(n);
        for (std::size_t i = 0; i < n; i++)
            pos[i] = i;
        codeword out;
        out.bits.assign(n, 0);
        for (std::size_t i = 0; i < w; i++)
        {
            const std::size_t j = i + std::size_t(stream.uniform_int(n - i));
            std::swap(pos[i], pos[j]);
            out.bits[pos[i]] = 1;
        }
        return out;
    }

    icc_check verify_icc(const codebook &book, std::uint64_t seed)
    {
        if (book.materialized())
            return verify_words(book.words(), book.length(), book.order());

        // Rank/unrank view: the analytic bound plus a random pair sample.
        icc_check out;
        out.min_overlap = book.length();
        rng stream(rng::mix(seed));
        for (int t = 0; t < 10000; t++)
        {
            codeword a = random_word(book, stream);
            codeword b = random_word(book, stream);
            if (a == b)
                continue;
            std::size_t ov = overlap_ones(a, b);
            out.min_overlap = std::min(out.min_overlap, ov);
            if (ov < book.order())
            {
                out.ok = false;
                out.witness = std::make_pair(std::size_t(0), std::size_t(0));
                return out;
            }
        }
        // Constant weight w forces pairwise overlap >= 2w - n_b = s.
        out.ok = 2 * book.weight() >= book.length() &&
                 2 * book.weight() - book.length() == book.order();
        return out;
    }

    // ---------- RATE AND RELIABILITY ----------

    double code_rate(std::size_t n_b, std::size_t s)
    {
        if (s == 0 || n_b < s || (n_b + s) % 2 != 0)
            throw std::invalid_argument("code_rate: invalid (n_b, s)");
        bigint c = binomial(n_b, (n_b + s) / 2);
        bigfloat lg = boost::multiprecision::log2(bigfloat(c));
        return double(lg / n_b);
    }

    iep_report theoretical_iep(std::size_t n_b, std::size_t l)
    {
        if (l == 0 || n_b < l)
            throw std::invalid_argument("theoretical_iep: need n_b >= l >= 1");
        if ((n_b + l) % 2 != 0)
            throw std::invalid_argument("theoretical_iep: n_b + l must be even");

        const std::size_t w = (n_b + l) / 2;

        // Binomial route.
        bigint c = binomial(n_b, w);
        bigint num = c - 1;
        bigint den = bigint(1) << (n_b + 1);

        // Factorial route: (n_b! - w!(n_b-w)!) / (2^(n_b+1) w!(n_b-w)!).
        auto factorial = [](std::size_t n)
        {
            bigint f = 1;
            for (std::size_t i = 2; i <= n; i++)
                f *= bigint(i);
            return f;
        };
        bigint fw = factorial(w) * factorial(n_b - w);
        bigint num_f = factorial(n_b) - fw;
        bigint den_f = (bigint(1) << (n_b + 1)) * fw;

        // The two routes must be the same rational number.
        if (num * den_f != num_f * den)
            throw std::logic_error("theoretical_iep: the two closed forms disagree");

        iep_report out;
        out.n_b = n_b;
        out.l = l;
        out.k = 1;
        out.numerator = num;
        out.denominator = den;
        out.p_i = double(bigfloat(num) / bigfloat(den));
        out.p_i_dpd = out.p_i;
        return out;
    }

    iep_report dpd_adjust(const iep_report &r, std::uint64_t k)
    {
        if (k == 0)
            throw std::invalid_argument("dpd_adjust: k must be at least 1");
        iep_report out = r;
        out.k = k;
        out.cpd_zero = false;
        out.p_i_dpd = double(bigfloat(r.numerator) / (bigfloat(r.denominator) * k));
        return out;
    }

    iep_report cpd_adjust(const iep_report &r)
    {
        iep_report out = r;
        out.cpd_zero = true;
        out.p_i_dpd = 0.0;
        return out;
    }
}
