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

#include "iccsim/channel_model.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace iccsim
{
    // ---------- VALIDATION ----------

    void validate(const one_ring_params &p)
    {
        if (p.delta <= 0.0)
            throw std::invalid_argument("one_ring_params: delta must be positive");
        if (p.n_antennas == 0)
            throw std::invalid_argument("one_ring_params: n_antennas must be at least 1");
        if (p.spacing <= 0.0)
            throw std::invalid_argument("one_ring_params: spacing must be positive");
        if (p.theta < -pi / 3.0 || p.theta > pi / 3.0)
            throw std::invalid_argument("one_ring_params: theta outside the served sector [-pi/3, pi/3]");
    }

    // ---------- QUADRATURE ----------

    // Adaptive Simpson on a complex integrand, absolute tolerance on each half.
    namespace
    {
        using cx = std::complex<double>;

        cx adaptive_step(const std::function<cx(double)> &f, double a, double b,
                         cx fa, cx fm, cx fb, cx whole, double tol, int depth)
        {
            double m = 0.5 * (a + b);
            double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            cx flm = f(lm), frm = f(rm);
            cx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            cx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            cx delta = left + right - whole;
            if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
                return left + right + delta / 15.0;
            return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }

        cx adaptive_simpson(const std::function<cx(double)> &f, double a, double b, double tol)
        {
            cx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
            cx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            return adaptive_step(f, a, b, fa, fm, fb, whole, tol, 48);
        }
    }

    covariance_matrix one_ring_covariance(const one_ring_params &p)
    {
        validate(p);
        const arma::uword n = p.n_antennas;
        const double lo = p.theta - p.delta;
        const double hi = p.theta + p.delta;
        const double norm = 1.0 / (2.0 * p.delta);

        // Toeplitz: the entry depends on the antenna index difference only.
        arma::cx_vec r(n);
        r[0] = cx(1.0, 0.0);
        for (arma::uword k = 1; k < n; k++)
        {
            const double freq = 2.0 * pi * p.spacing * double(k);
            auto f = [freq](double alpha)
            { return std::polar(1.0, -freq * std::sin(alpha)); };
            r[k] = norm * adaptive_simpson(f, lo, hi, 1e-10);
        }

        covariance_matrix out;
        out.entries.set_size(n, n);
        for (arma::uword m = 0; m < n; m++)
            for (arma::uword c = 0; c < n; c++)
                out.entries(m, c) = (m >= c) ? r[m - c] : std::conj(r[c - m]);
        // Exact unit diagonal; the integral of a unit-modulus phasor at lag 0.
        out.entries.diag().fill(cx(1.0, 0.0));

        arma::vec ev;
        if (!arma::eig_sym(ev, out.entries))
            throw std::runtime_error("one_ring_covariance: eigenvalue computation failed");
        const double lmax = ev.max();
        out.rank = arma::uword(arma::sum(ev > default_rank_threshold * lmax));
        return out;
    }

    // ---------- EIGENSTRUCTURE ----------

    arma::cx_mat eigen_structure::reconstruct() const
    {
        return vectors * arma::diagmat(arma::cx_vec(values, arma::vec(values.n_elem, arma::fill::zeros))) *
               vectors.t();
    }

    arma::cx_mat eigen_structure::pseudo_inverse() const
    {
        return vectors *
               arma::diagmat(arma::cx_vec(pseudo_values, arma::vec(pseudo_values.n_elem, arma::fill::zeros))) *
               vectors.t();
    }

    eigen_structure eigendecompose_hermitian(const arma::cx_mat &m, double rel_threshold)
    {
        if (m.n_rows != m.n_cols)
            throw std::invalid_argument("eigendecompose: matrix must be square");
        if (arma::norm(m - m.t(), "fro") > 1e-10 * std::max(1.0, arma::norm(m, "fro")))
            throw std::invalid_argument("eigendecompose: matrix must be Hermitian");

        arma::vec ev;
        arma::cx_mat vec;
        if (!arma::eig_sym(ev, vec, arma::cx_mat(0.5 * (m + m.t()))))
            throw std::runtime_error("eigendecompose: solver failed");

        const double lmax = ev.n_elem ? ev.max() : 0.0;
        const double cut = rel_threshold * lmax;

        // eig_sym returns ascending order; keep values above the cut, descending.
        std::vector<arma::uword> keep;
        for (arma::uword i = ev.n_elem; i-- > 0;)
            if (ev[i] > cut)
                keep.push_back(i);

        eigen_structure out;
        out.values.set_size(keep.size());
        out.pseudo_values.set_size(keep.size());
        out.vectors.set_size(m.n_rows, keep.size());
        for (arma::uword j = 0; j < keep.size(); j++)
        {
            out.values[j] = ev[keep[j]];
            out.pseudo_values[j] = 1.0 / ev[keep[j]];
            out.vectors.col(j) = vec.col(keep[j]);
        }
        return out;
    }

    eigen_structure eigendecompose(const covariance_matrix &cov, double rel_threshold)
    {
        return eigendecompose_hermitian(cov.entries, rel_threshold);
    }

    // ---------- SAMPLING ----------

    covariance_factor covariance_sqrt(const covariance_matrix &cov)
    {
        arma::vec ev;
        arma::cx_mat vec;
        if (!arma::eig_sym(ev, vec, cov.entries))
            throw std::runtime_error("covariance_sqrt: eigenvalue computation failed");
        const double lmax = ev.n_elem ? ev.max() : 0.0;
        if (lmax <= 0.0)
            throw std::runtime_error("covariance_sqrt: matrix has no positive eigenvalue");
        arma::vec clipped = ev;
        for (arma::uword i = 0; i < clipped.n_elem; i++)
        {
            if (clipped[i] < -1e-6 * lmax)
                throw std::runtime_error("covariance_sqrt: matrix is not positive semidefinite "
                                         "within the repair tolerance");
            if (clipped[i] < 0.0)
                clipped[i] = 0.0; // quadrature noise repair
        }
        covariance_factor out;
        out.factor = vec * arma::diagmat(arma::cx_vec(arma::sqrt(clipped),
                                                      arma::vec(clipped.n_elem, arma::fill::zeros)));
        return out;
    }

    channel_realization sample_cir(const covariance_factor &bob, const covariance_factor &ava,
                                   arma::uword taps, rng &stream)
    {
        if (taps == 0)
            throw std::invalid_argument("sample_cir: taps must be at least 1");
        const arma::uword n_b = bob.factor.n_rows;
        const arma::uword n_a = ava.factor.n_rows;

        channel_realization out;
        out.pdp = arma::vec(taps, arma::fill::value(1.0 / double(taps)));
        out.bob_cirs.set_size(n_b, taps);
        out.ava_cirs.set_size(n_a, taps);
        for (arma::uword l = 0; l < taps; l++)
            out.bob_cirs.col(l) = std::sqrt(out.pdp[l]) * (bob.factor * stream.cgaussian_vec(n_b));
        for (arma::uword l = 0; l < taps; l++)
            out.ava_cirs.col(l) = std::sqrt(out.pdp[l]) * (ava.factor * stream.cgaussian_vec(n_a));
        return out;
    }

    channel_realization sample_cir(const one_ring_params &bob, const one_ring_params &ava,
                                   arma::uword taps, std::uint64_t seed)
    {
        covariance_factor fb = covariance_sqrt(one_ring_covariance(bob));
        covariance_factor fa = covariance_sqrt(one_ring_covariance(ava));
        rng stream(rng::mix(seed));
        return sample_cir(fb, fa, taps, stream);
    }

    // ---------- DFT SLICES ----------

    dft_submatrix make_dft_submatrix(arma::uword n_fft, arma::uword taps, const arma::uvec &rows)
    {
        if (taps == 0)
            throw std::invalid_argument("make_dft_submatrix: taps must be at least 1");
        for (arma::uword i = 0; i < rows.n_elem; i++)
        {
            if (rows[i] >= n_fft)
                throw std::invalid_argument("make_dft_submatrix: row index out of range");
            for (arma::uword j = i + 1; j < rows.n_elem; j++)
                if (rows[i] == rows[j])
                    throw std::invalid_argument("make_dft_submatrix: duplicate row indices");
        }

        dft_submatrix out;
        out.n_fft = n_fft;
        out.rows = rows;
        out.matrix.set_size(rows.n_elem, taps);
        for (arma::uword r = 0; r < rows.n_elem; r++)
            for (arma::uword l = 0; l < taps; l++)
                out.matrix(r, l) = std::polar(1.0, -2.0 * pi * double(rows[r]) * double(l) / double(n_fft));
        out.gram = out.matrix.st() * arma::conj(out.matrix);
        out.gram_eig = eigendecompose_hermitian(out.gram);
        return out;
    }

    arma::cx_mat fs_covariance(const dft_submatrix &f, const arma::vec &pdp)
    {
        if (pdp.n_elem != f.matrix.n_cols)
            throw std::invalid_argument("fs_covariance: pdp length must equal the tap count");
        return f.matrix * arma::diagmat(arma::cx_vec(pdp, arma::vec(pdp.n_elem, arma::fill::zeros))) *
               f.matrix.t();
    }

    // ---------- SUPPORT OVERLAP ----------

    namespace
    {
        // Membership of x (taken mod 1 into [-1/2, 1/2)) in the arc
        // [lo, hi] mod 1.
        bool in_arc(double x, double lo, double hi)
        {
            auto wrap_half = [](double v)
            {
                double w = std::fmod(v + 0.5, 1.0);
                if (w < 0.0)
                    w += 1.0;
                return w - 0.5;
            };
            x = wrap_half(x);
            lo = wrap_half(lo);
            hi = wrap_half(hi);
            if (lo <= hi)
                return x >= lo && x <= hi;
            return x >= lo || x <= hi; // arc crosses the wrap point
        }
    }

    overlap_report support_overlap(const one_ring_params &bob, const one_ring_params &ava)
    {
        validate(bob);
        validate(ava);
        if (bob.n_antennas != ava.n_antennas || bob.spacing != ava.spacing || bob.delta != ava.delta)
            throw std::invalid_argument("support_overlap: both users must share delta, spacing and antenna count");

        const arma::uword n = bob.n_antennas;
        const double d = bob.spacing;
        const double b_lo = d * std::sin(bob.theta - bob.delta);
        const double b_hi = d * std::sin(bob.theta + bob.delta);
        const double a_lo = d * std::sin(ava.theta - ava.delta);
        const double a_hi = d * std::sin(ava.theta + ava.delta);

        overlap_report out;
        for (arma::uword k = 0; k < n; k++)
        {
            // DFT grid point k/N mapped into [-1/2, 1/2)
            double x = double(k) / double(n);
            if (x >= 0.5)
                x -= 1.0;
            const bool in_b = in_arc(x, b_lo, b_hi);
            const bool in_a = in_arc(x, a_lo, a_hi);
            if (in_b)
                out.rho1_estimate++;
            if (in_b && in_a)
                out.a_estimate++;
        }
        out.disjoint = (out.a_estimate == 0);
        return out;
    }
}
