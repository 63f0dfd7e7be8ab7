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

#include "iccsim/channel_model.hpp"
#include "iccsim/rng.hpp"
#include "test_support.hpp"

using namespace iccsim;
using cx = std::complex<double>;

// Independent oracle for the one-ring entry through the Bessel series
//   exp(-j c sin a) = sum_k J_k(c) exp(-j k a),
// integrated term by term over [theta - delta, theta + delta]. A different
// method than the adaptive quadrature under test; truncation error is far
// below the comparison tolerance for the |c| values used here.
static cx bessel_entry(int m, int n, double theta, double delta, double spacing)
{
    double c = 2.0 * pi * spacing * double(m - n);
    cx total = 0.0;
    const int kmax = 80;
    for (int k = -kmax; k <= kmax; k++)
    {
        // J_{-k}(c) = (-1)^k J_k(c); cyl_bessel_j needs a nonnegative order
        // and argument.
        double jk = std::cyl_bessel_j(double(std::abs(k)), std::abs(c));
        if (std::abs(k) % 2 == 1 && k < 0)
            jk = -jk;
        if (c < 0.0 && std::abs(k) % 2 == 1)
            jk = -jk;
        double s = (k == 0) ? 1.0 : std::sin(double(k) * delta) / (double(k) * delta);
        total += jk * s * std::exp(cx(0.0, -double(k) * theta));
    }
    return total;
}

static void test_oracle_entries()
{
    // Frozen reference values from 30-digit quadrature, real case
    // theta = 0, delta = pi/6, spacing = 0.5 (imaginary parts vanish by
    // symmetry) and a complex case theta = 0.3, delta = pi/8, spacing = 0.45.
    const double ref_a[4] = {1.0, 0.62359171147697734929,
                             -0.028455773719562646132, -0.2284696641665809014};
    one_ring_params pa;
    pa.theta = 0.0;
    pa.delta = pi / 6.0;
    pa.spacing = 0.5;
    pa.n_antennas = 4;
    covariance_matrix ra = one_ring_covariance(pa);
    for (arma::uword m = 0; m < 4; m++)
        for (arma::uword n = 0; n < 4; n++)
        {
            int d = int(m) - int(n);
            cx want(ref_a[std::abs(d)], 0.0);
            CHECK(std::abs(ra.entries(m, n) - want) <= 1e-9);
            cx bess = bessel_entry(int(m), int(n), pa.theta, pa.delta, pa.spacing);
            CHECK(std::abs(ra.entries(m, n) - bess) <= 1e-9);
        }

    const cx ref_b[4] = {cx(1.0, 0.0),
                         cx(0.56601887413296900952, -0.60377347865173816545),
                         cx(-0.041576433171422670964, -0.41257390860128872722),
                         cx(-0.023022295481519130932, 0.030947144765140280598)};
    one_ring_params pb;
    pb.theta = 0.3;
    pb.delta = pi / 8.0;
    pb.spacing = 0.45;
    pb.n_antennas = 4;
    covariance_matrix rb = one_ring_covariance(pb);
    for (arma::uword m = 0; m < 4; m++)
        for (arma::uword n = 0; n < 4; n++)
        {
            int d = int(m) - int(n);
            cx want = (d >= 0) ? ref_b[d] : std::conj(ref_b[-d]);
            CHECK(std::abs(rb.entries(m, n) - want) <= 1e-9);
            cx bess = bessel_entry(int(m), int(n), pb.theta, pb.delta, pb.spacing);
            CHECK(std::abs(rb.entries(m, n) - bess) <= 1e-9);
        }
}

static void test_small_spread_limit()
{
    // As delta -> 0 the ring collapses to a point source and the entry tends
    // to the pure steering phasor exp(-j 2 pi D (m - n) sin(theta)).
    one_ring_params p;
    p.theta = 0.4;
    p.delta = 1e-6;
    p.spacing = 0.5;
    p.n_antennas = 6;
    covariance_matrix r = one_ring_covariance(p);
    for (arma::uword m = 0; m < 6; m++)
        for (arma::uword n = 0; n < 6; n++)
        {
            cx phasor = std::exp(cx(0.0, -2.0 * pi * p.spacing * double(int(m) - int(n)) *
                                             std::sin(p.theta)));
            CHECK(std::abs(r.entries(m, n) - phasor) <= 1e-6);
        }
}

static void test_structural_properties()
{
    // Hermitian, unit-diagonal, PSD, entries bounded by one in modulus, over
    // a spread of parameter draws.
    rng stream(7);
    for (int trial = 0; trial < 15; trial++)
    {
        one_ring_params p;
        p.theta = stream.uniform(-pi / 4.0, pi / 4.0);
        p.delta = stream.uniform(0.01, pi / 8.0);
        p.spacing = stream.uniform(0.25, 1.0);
        p.n_antennas = 5 + stream.uniform_int(8);
        covariance_matrix r = one_ring_covariance(p);

        CHECK(arma::norm(r.entries - r.entries.t(), "fro") <= 1e-10);
        for (arma::uword i = 0; i < p.n_antennas; i++)
            CHECK(std::abs(r.entries(i, i) - cx(1.0, 0.0)) <= 1e-10);
        for (arma::uword i = 0; i < p.n_antennas; i++)
            for (arma::uword jj = 0; jj < p.n_antennas; jj++)
                CHECK(std::abs(r.entries(i, jj)) <= 1.0 + 1e-10);
        arma::vec ev = arma::eig_sym(r.entries);
        CHECK(ev.min() >= -1e-8 * ev.max());
        CHECK(r.rank >= 1 && r.rank <= p.n_antennas);
    }
}

static void test_validation()
{
    one_ring_params p;
    p.n_antennas = 4;
    p.theta = pi / 2.0; // outside the served sector
    CHECK_THROWS(validate(p), std::invalid_argument);
    p.theta = 0.0;
    p.delta = 0.0;
    CHECK_THROWS(validate(p), std::invalid_argument);
    p.delta = pi / 24.0;
    p.spacing = 0.0;
    CHECK_THROWS(validate(p), std::invalid_argument);
    p.spacing = 0.5;
    p.n_antennas = 0;
    CHECK_THROWS(validate(p), std::invalid_argument);
    p.n_antennas = 4;
    validate(p); // and the repaired struct passes
}

static void test_sqrt_and_eigen()
{
    one_ring_params p;
    p.theta = 0.2;
    p.delta = pi / 16.0;
    p.n_antennas = 12;
    covariance_matrix r = one_ring_covariance(p);

    covariance_factor w = covariance_sqrt(r);
    CHECK(arma::norm(w.factor * w.factor.t() - r.entries, "fro") <= 1e-8);

    eigen_structure e = eigendecompose(r);
    CHECK(e.rank() == r.rank);
    // Truncation discards only eigenvalues below the relative threshold, so
    // the reconstruction error is bounded by n * threshold * lambda_max.
    arma::vec full = arma::eig_sym(r.entries);
    double cut = default_rank_threshold * full.max() * double(p.n_antennas);
    CHECK(arma::norm(e.reconstruct() - r.entries, "fro") <= cut + 1e-9);
    for (arma::uword i = 0; i + 1 < e.rank(); i++)
        CHECK(e.values[i] >= e.values[i + 1]);
    for (arma::uword i = 0; i < e.rank(); i++)
        CHECK(std::abs(e.values[i] * e.pseudo_values[i] - 1.0) <= 1e-12);
    CHECK(arma::norm(e.vectors.t() * e.vectors -
                     arma::cx_mat(arma::eye<arma::mat>(e.rank(), e.rank()),
                                  arma::mat(e.rank(), e.rank(), arma::fill::zeros)),
                     "fro") <= 1e-10);

    // Identity: full rank, every eigenvalue one, pseudo-inverse is identity.
    covariance_matrix ident;
    ident.entries = arma::cx_mat(arma::eye<arma::mat>(5, 5),
                                 arma::mat(5, 5, arma::fill::zeros));
    ident.rank = 5;
    eigen_structure ei = eigendecompose(ident);
    CHECK(ei.rank() == 5);
    CHECK(arma::abs(ei.values - 1.0).max() <= 1e-12);
    CHECK(arma::norm(ei.pseudo_inverse() - ident.entries, "fro") <= 1e-10);

    // Rank one: v v^H keeps a single eigenvalue ||v||^2.
    rng stream(3);
    arma::cx_vec v = stream.cgaussian_vec(6);
    eigen_structure e1 = eigendecompose_hermitian(v * v.t());
    CHECK(e1.rank() == 1);
    CHECK(std::abs(e1.values[0] - std::real(arma::cdot(v, v))) <= 1e-10);
}

static void test_sample_cir_statistics()
{
    // factor * g with g iid CN(0,1) has covariance factor * factor^H = R; the
    // empirical covariance over many draws converges at the 1/sqrt(M) rate.
    one_ring_params p;
    p.theta = -0.15;
    p.delta = pi / 20.0;
    p.n_antennas = 8;
    covariance_matrix r = one_ring_covariance(p);
    covariance_factor w = covariance_sqrt(r);

    const arma::uword taps = 4;
    const int draws = 4000;
    arma::cx_mat acc(8, 8, arma::fill::zeros);
    arma::vec tap_power(taps, arma::fill::zeros);
    rng stream(11);
    for (int d = 0; d < draws; d++)
    {
        channel_realization c = sample_cir(w, w, taps, stream);
        CHECK(c.bob_cirs.n_rows == 8 && c.bob_cirs.n_cols == taps);
        CHECK(std::abs(arma::accu(c.pdp) - 1.0) <= 1e-12);
        for (arma::uword l = 0; l < taps; l++)
        {
            arma::cx_vec col = c.bob_cirs.col(l);
            acc += col * col.t() / c.pdp[l];
            tap_power[l] += std::real(arma::cdot(col, col));
        }
    }
    acc /= double(draws * taps);
    CHECK(arma::norm(acc - r.entries, "fro") / arma::norm(r.entries, "fro") <= 0.05);
    // E ||tap l||^2 = N_T * pdp[l].
    for (arma::uword l = 0; l < taps; l++)
        CHECK(std::abs(tap_power[l] / double(draws) - 8.0 * 0.25) <= 0.15);

    // Bob and Ava draws are independent: empirical cross-covariance is small.
    arma::cx_mat cross(8, 8, arma::fill::zeros);
    rng stream2(12);
    for (int d = 0; d < draws; d++)
    {
        channel_realization c = sample_cir(w, w, taps, stream2);
        cross += c.bob_cirs.col(0) * c.ava_cirs.col(0).t();
    }
    CHECK(arma::norm(cross / double(draws), "fro") <= 0.12);

    // Seeded overload is deterministic in the seed.
    channel_realization a = sample_cir(p, p, taps, 99);
    channel_realization b = sample_cir(p, p, taps, 99);
    channel_realization c = sample_cir(p, p, taps, 100);
    CHECK(arma::norm(a.bob_cirs - b.bob_cirs, "fro") == 0.0);
    CHECK(arma::norm(a.bob_cirs - c.bob_cirs, "fro") > 1e-6);
}

static void test_dft_submatrix()
{
    // Full grid: gram = N I_L exactly (geometric sums cancel off-diagonal).
    arma::uvec all8(8);
    for (arma::uword i = 0; i < 8; i++)
        all8[i] = i;
    dft_submatrix f = make_dft_submatrix(8, 4, all8);
    CHECK(f.matrix.n_rows == 8 && f.matrix.n_cols == 4);
    arma::cx_mat want(arma::mat(4, 4, arma::fill::eye) * 8.0,
                      arma::mat(4, 4, arma::fill::zeros));
    CHECK(arma::norm(f.gram - want, "fro") <= 1e-9);

    // Entry convention: unit modulus, exp(-j 2 pi r l / N).
    arma::uvec rows = {1, 3, 6};
    dft_submatrix g = make_dft_submatrix(8, 3, rows);
    for (arma::uword r = 0; r < 3; r++)
        for (arma::uword l = 0; l < 3; l++)
        {
            cx want_e = std::exp(cx(0.0, -2.0 * pi * double(rows[r]) * double(l) / 8.0));
            CHECK(std::abs(g.matrix(r, l) - want_e) <= 1e-12);
        }
    // gram = matrix^T conj(matrix); its trace is s * L.
    CHECK(arma::norm(g.gram - (g.matrix.st() * arma::conj(g.matrix)), "fro") <= 1e-12);
    CHECK(std::abs(std::real(arma::trace(g.gram)) - 9.0) <= 1e-9);
}

static void test_fs_covariance()
{
    arma::uvec rows = {0, 2, 3, 7, 9};
    dft_submatrix f = make_dft_submatrix(16, 3, rows);
    arma::vec pdp(3);
    pdp.fill(1.0 / 3.0);
    arma::cx_mat cf = fs_covariance(f, pdp);
    CHECK(cf.n_rows == 5 && cf.n_cols == 5);
    // Unit diagonal sum: trace = s for a pdp summing to one.
    CHECK(std::abs(std::real(arma::trace(cf)) - 5.0) <= 1e-9);
    CHECK(arma::norm(cf - cf.t(), "fro") <= 1e-10);
    arma::vec ev = arma::eig_sym(cf);
    CHECK(ev.min() >= -1e-9 * ev.max());
    // Rank is min(s, L): three taps cap the rank at three here.
    eigen_structure e = eigendecompose_hermitian(cf);
    CHECK(e.rank() == 3);

    // s <= L: full rank s.
    arma::uvec rows2 = {1, 5};
    dft_submatrix f2 = make_dft_submatrix(16, 3, rows2);
    eigen_structure e2 = eigendecompose_hermitian(fs_covariance(f2, pdp));
    CHECK(e2.rank() == 2);
}

static void test_support_overlap()
{
    one_ring_params p1, p2;
    p1.n_antennas = p2.n_antennas = 256;
    p1.delta = p2.delta = pi / 24.0;

    // Same angle: the supports coincide, a = rho1.
    p1.theta = 0.1;
    p2.theta = 0.1;
    overlap_report same = support_overlap(p1, p2);
    CHECK(same.a_estimate == same.rho1_estimate);
    CHECK(same.rho1_estimate > 0);
    CHECK(!same.disjoint);

    // Sector edges: the supports sit on opposite sides of zero.
    p1.theta = -pi / 4.0;
    p2.theta = pi / 4.0;
    overlap_report far_apart = support_overlap(p1, p2);
    CHECK(far_apart.a_estimate == 0);
    CHECK(far_apart.disjoint);
    CHECK(far_apart.rho1_estimate > 0);

    // Half-shifted ring: genuine partial overlap.
    p1.theta = 0.0;
    p1.delta = pi / 12.0;
    p2.delta = pi / 12.0;
    p2.theta = p1.delta / 2.0;
    p1.n_antennas = 512;
    p2.n_antennas = 512;
    overlap_report part = support_overlap(p1, p2);
    CHECK(part.a_estimate > 0);
    CHECK(part.a_estimate < part.rho1_estimate);
    CHECK(!part.disjoint);

    // rho1 tracks the support width D (sin(theta+delta) - sin(theta-delta))
    // at the 1/N_T grid resolution.
    p1.theta = 0.0;
    p1.delta = pi / 24.0;
    p1.n_antennas = 1024;
    overlap_report res = support_overlap(p1, p1);
    double width = 0.5 * (std::sin(p1.delta) - std::sin(-p1.delta));
    double expect = width * 1024.0;
    CHECK(std::abs(double(res.rho1_estimate) - expect) <= 3.0);
}

static void test_sample_covariance_convergence()
{
    // The empirical covariance of drawn realizations converges toward the
    // model: the Frobenius error shrinks by at least 2x from 500 to 8000
    // draws (the 1/sqrt(n) rate predicts 4x).
    one_ring_params p;
    p.theta = 0.15;
    p.n_antennas = 24;
    covariance_matrix cov = one_ring_covariance(p);
    covariance_factor w = covariance_sqrt(cov);
    rng stream(31);
    double err[2];
    std::size_t idx = 0;
    for (std::size_t draws : {500ul, 8000ul})
    {
        arma::cx_mat acc(p.n_antennas, p.n_antennas, arma::fill::zeros);
        std::size_t terms = 0;
        for (std::size_t d = 0; d < draws; d++)
        {
            channel_realization chan = sample_cir(w, w, 2, stream);
            for (arma::uword l = 0; l < 2; l++)
            {
                arma::cx_vec tap = chan.bob_cirs.col(l) / std::sqrt(chan.pdp(l));
                acc += tap * tap.t();
                terms++;
            }
        }
        acc /= double(terms);
        err[idx++] = arma::norm(acc - cov.entries, "fro") /
                     arma::norm(cov.entries, "fro");
    }
    CHECK_MSG(err[0] > 2.0 * err[1],
              "errors " + std::to_string(err[0]) + " -> " + std::to_string(err[1]));
}

static void test_pseudo_inverse_sandwich()
{
    // R * pinv(R) * R reproduces R on the retained subspace: the sandwich
    // equals the truncated reconstruction to the rank threshold's precision.
    for (double theta : {0.0, -0.4, 0.9})
    {
        one_ring_params p;
        p.theta = theta;
        p.n_antennas = 48;
        covariance_matrix cov = one_ring_covariance(p);
        eigen_structure eig = eigendecompose(cov);
        arma::cx_mat sandwich = cov.entries * eig.pseudo_inverse() * cov.entries;
        arma::cx_mat retained = eig.reconstruct();
        double rel = arma::norm(sandwich - retained, "fro") /
                     arma::norm(retained, "fro");
        CHECK_MSG(rel <= 1e-5, "rel = " + std::to_string(rel));
    }
}

static void test_overlap_iff_diagonal()
{
    // Full support overlap occurs exactly on identical angles: across 50
    // pairs, a = rho_1 iff theta_1 = theta_2 (separations of at least 0.05
    // rad keep distinct supports distinguishable at this array size).
    rng stream(32);
    std::size_t diag_seen = 0, off_seen = 0;
    for (int t = 0; t < 50; t++)
    {
        double t1 = stream.uniform(-1.0, 1.0);
        double t2;
        bool same = stream.uniform() < 0.4;
        if (same)
            t2 = t1;
        else
        {
            do
                t2 = stream.uniform(-1.0, 1.0);
            while (std::abs(t2 - t1) < 0.05);
        }
        one_ring_params p1, p2;
        p1.theta = t1;
        p1.n_antennas = 512;
        p2.theta = t2;
        p2.n_antennas = 512;
        overlap_report ov = support_overlap(p1, p2);
        if (same)
        {
            CHECK(ov.a_estimate == ov.rho1_estimate);
            diag_seen++;
        }
        else
        {
            CHECK_MSG(ov.a_estimate < ov.rho1_estimate,
                      "thetas " + std::to_string(t1) + ", " + std::to_string(t2));
            off_seen++;
        }
    }
    CHECK(diag_seen >= 10);
    CHECK(off_seen >= 10);
}

int main()
{
    test_oracle_entries();
    test_small_spread_limit();
    test_structural_properties();
    test_validation();
    test_sqrt_and_eigen();
    test_sample_cir_statistics();
    test_dft_submatrix();
    test_fs_covariance();
    test_support_overlap();
    test_sample_covariance_convergence();
    test_pseudo_inverse_sandwich();
    test_overlap_iff_diagonal();
    return testsup::summary("test_channel_model");
}
