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

#include "iccsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <armadillo>
#include <boost/math/distributions/beta.hpp>

#include "iccsim/airlink.hpp"
#include "iccsim/channel_model.hpp"
#include "iccsim/common.hpp"
#include "iccsim/icc_code.hpp"
#include "iccsim/pilot_protocol.hpp"
#include "iccsim/receiver.hpp"
#include "iccsim/rng.hpp"

namespace iccsim
{
    // ---------- SUPPORT ----------

    void parallel_for(std::size_t n, std::size_t threads,
                      const std::function<void(std::size_t)> &body)
    {
        if (n == 0)
            return;
        if (threads <= 1 || n == 1)
        {
            for (std::size_t i = 0; i < n; i++)
                body(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::mutex error_guard;
        std::exception_ptr error;
        auto worker = [&]()
        {
            for (;;)
            {
                const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n)
                    return;
                try
                {
                    body(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(error_guard);
                    if (!error)
                        error = std::current_exception();
                    next.store(n, std::memory_order_relaxed);
                    return;
                }
            }
        };

        std::vector<std::thread> pool;
        const std::size_t workers = std::min(threads, n);
        pool.reserve(workers);
        for (std::size_t i = 0; i < workers; i++)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }

    mean_stderr summarize(const std::vector<double> &xs)
    {
        mean_stderr out;
        if (xs.empty())
            return out;
        const double n = double(xs.size());
        double sum = 0.0;
        for (double x : xs)
            sum += x;
        out.mean = sum / n;
        if (xs.size() > 1)
        {
            double q = 0.0;
            for (double x : xs)
                q += (x - out.mean) * (x - out.mean);
            out.stderr_of_mean = std::sqrt(q / (n * (n - 1.0)));
        }
        return out;
    }

    double binomial_upper_bound95(std::uint64_t successes, std::uint64_t trials)
    {
        if (trials == 0)
            throw std::invalid_argument("binomial_upper_bound95: no trials");
        if (successes > trials)
            throw std::invalid_argument("binomial_upper_bound95: successes exceed trials");
        if (successes == trials)
            return 1.0;
        boost::math::beta_distribution<double> b(double(successes) + 1.0,
                                                 double(trials - successes));
        return boost::math::quantile(b, 0.95);
    }

    // ---------- SHARED PARSING ----------

    namespace
    {
        struct scenario
        {
            std::size_t n_fft = 32, n_b = 12, taps = 4, code_order = 4, n_t = 100;
            std::size_t phase_resolution = 8, symbols = 2, k_grid = 5;
            double spacing = 0.5, spread = pi / 24.0, snr_db = 20.0, rho_b = 1.0;
            double phase_step = pi / 2.0, detector_pf = 1e-3;
            double theta1 = 0.0, theta2 = pi / 5.0;

            double noise_var() const
            {
                return rho_b / std::pow(10.0, snr_db / 10.0);
            }
        };

        void read_scenario(config &cfg, scenario &sc)
        {
            sc.n_fft = cfg.get_uint("scenario", "n_fft", sc.n_fft);
            sc.n_b = cfg.get_uint("scenario", "n_b", sc.n_b);
            sc.taps = cfg.get_uint("scenario", "taps", sc.taps);
            sc.code_order = cfg.get_uint("scenario", "code_order", sc.code_order);
            sc.n_t = cfg.get_uint("scenario", "n_t", sc.n_t);
            sc.phase_resolution =
                cfg.get_uint("scenario", "phase_resolution", sc.phase_resolution);
            sc.symbols = cfg.get_uint("scenario", "symbols", sc.symbols);
            sc.k_grid = cfg.get_uint("scenario", "k_grid", sc.k_grid);
            sc.spacing = cfg.get_double("scenario", "spacing", sc.spacing);
            sc.spread = cfg.get_double("scenario", "spread", sc.spread);
            sc.snr_db = cfg.get_double("scenario", "snr_db", sc.snr_db);
            sc.rho_b = cfg.get_double("scenario", "rho_b", sc.rho_b);
            sc.phase_step = cfg.get_double("scenario", "phase_step", sc.phase_step);
            sc.detector_pf = cfg.get_double("scenario", "detector_pf", sc.detector_pf);
            sc.theta1 = cfg.get_double("scenario", "theta1", sc.theta1);
            sc.theta2 = cfg.get_double("scenario", "theta2", sc.theta2);
            if (sc.taps == 0 || sc.n_t == 0 || sc.symbols < 2)
                throw config_error("scenario: taps and n_t must be positive, symbols >= 2");
            if (sc.rho_b <= 0.0)
                throw config_error("scenario: rho_b must be positive");
        }

        struct run_header
        {
            std::uint64_t seed = 1, trials = 0;
            std::size_t threads = 1;
        };

        run_header read_header(config &cfg, std::uint64_t default_trials)
        {
            run_header h;
            h.seed = cfg.get_uint("experiment", "seed", 1);
            h.trials = cfg.get_uint("experiment", "trials", default_trials);
            h.threads = cfg.get_uint("experiment", "threads", 1);
            if (h.threads == 0)
                h.threads = 1;
            return h;
        }

        void echo_metadata(result_table &table, const config &cfg,
                           const run_header &h, const char *name)
        {
            table.add_metadata("[meta]");
            table.add_metadata(std::string("version = ") + version_string);
            table.add_metadata(std::string("experiment = ") + name);
            table.add_metadata("seed = " + std::to_string(h.seed));
            const std::string text = cfg.serialize();
            std::size_t start = 0;
            while (start < text.size())
            {
                std::size_t stop = text.find('\n', start);
                if (stop == std::string::npos)
                    stop = text.size();
                table.add_metadata(text.substr(start, stop - start));
                start = stop + 1;
            }
        }

        double rate_stderr(double successes, double trials)
        {
            const double p = successes / trials;
            return std::sqrt(std::max(p * (1.0 - p), 0.0) / trials);
        }

        arma::uvec to_uvec(const std::vector<std::size_t> &v)
        {
            arma::uvec out(v.size());
            for (std::size_t i = 0; i < v.size(); i++)
                out(i) = arma::uword(v[i]);
            return out;
        }

        std::vector<std::size_t> intersect_sorted(const std::vector<std::size_t> &a,
                                                  const std::vector<std::size_t> &b)
        {
            std::vector<std::size_t> out;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(out));
            return out;
        }

        double frob2(const arma::cx_mat &m)
        {
            return arma::accu(arma::square(arma::abs(m)));
        }

        // Spatial covariance, its spectral factor, and its eigenstructure for
        // one mean AoA; built once per distinct angle and antenna count.
        struct angle_block
        {
            covariance_matrix cov;
            covariance_factor factor;
            eigen_structure eig;
        };

        angle_block make_angle_block(double theta, double spread, double spacing,
                                     std::size_t n_t)
        {
            one_ring_params p;
            p.theta = theta;
            p.delta = spread;
            p.spacing = spacing;
            p.n_antennas = n_t;
            angle_block b;
            b.cov = one_ring_covariance(p);
            b.factor = covariance_sqrt(b.cov);
            b.eig = eigendecompose(b.cov);
            return b;
        }

        attack_mode parse_attack_mode(const std::string &s)
        {
            if (s == "silent")
                return attack_mode::silent;
            if (s == "spoof")
                return attack_mode::spoof;
            if (s == "null_antenna")
                return attack_mode::null_antenna;
            if (s == "jam_wideband")
                return attack_mode::jam_wideband;
            if (s == "jam_partial")
                return attack_mode::jam_partial;
            throw config_error("attacker: unknown mode '" + s + "'");
        }

        sap_strategy parse_sap_strategy(const std::string &s)
        {
            if (s == "mimic_bob")
                return sap_strategy::mimic_bob;
            if (s == "random_codebook_word")
                return sap_strategy::random_codebook_word;
            if (s == "arbitrary_random_pattern")
                return sap_strategy::arbitrary_random_pattern;
            throw config_error("attacker: unknown sap strategy '" + s + "'");
        }

        phase_strategy parse_phase_strategy(const std::string &s)
        {
            if (s == "random_quantized")
                return phase_strategy::random_quantized;
            if (s == "ramp_mimic")
                return phase_strategy::ramp_mimic;
            if (s == "copy_bob")
                return phase_strategy::copy_bob;
            throw config_error("attacker: unknown phase strategy '" + s + "'");
        }
    }

    // ---------- DELTA-F SWEEP ----------

    result_table run_deltaf_sweep(config &cfg)
    {
        scenario sc;
        read_scenario(cfg, sc);
        run_header h = read_header(cfg, 0);
        const std::vector<double> grid = cfg.get_double_list(
            "sweep", "theta_grid",
            {-pi / 4.0, -pi / 7.0, 0.0, pi / 7.0, pi / 4.0});
        const double power = cfg.get_double("attacker", "power", 1.0);
        if (grid.empty())
            throw config_error("sweep: theta_grid is empty");

        result_table table;
        echo_metadata(table, cfg, h, "deltaf_sweep");
        table.set_columns({"theta1", "theta2", "metric", "value", "stderr", "trials"});

        const codebook book(sc.n_b, sc.code_order);
        const phase_alphabet alphabet(sc.phase_resolution);
        const std::vector<std::size_t> psi_b = default_psi_b(sc.n_fft, sc.n_b);
        const double noise_var = sc.noise_var();

        // One block per distinct grid value; grid entries repeat across cells.
        std::map<double, angle_block> blocks;
        for (double th : grid)
            if (!blocks.count(th))
                blocks.emplace(th, make_angle_block(th, sc.spread, sc.spacing, sc.n_t));

        const std::size_t g = grid.size();
        for (std::size_t i1 = 0; i1 < g; i1++)
        {
            for (std::size_t i2 = 0; i2 < g; i2++)
            {
                const std::size_t cell = i1 * g + i2;
                const angle_block &b1 = blocks.at(grid[i1]);
                const angle_block &b2 = blocks.at(grid[i2]);
                const double rho1 = double(b1.eig.rank());
                const double tol = 1e-3 * double(sc.taps) * rho1;
                const double asym = asymptotic_delta_f(b1.cov, b2.cov, sc.taps);

                table.add_row({grid[i1], grid[i2], std::string("rho1"), rho1, 0.0,
                               std::int64_t(0)});
                table.add_row({grid[i1], grid[i2], std::string("deltaf_tolerance"),
                               tol, 0.0, std::int64_t(0)});
                table.add_row({grid[i1], grid[i2], std::string("deltaf_asymptotic"),
                               asym, 0.0, std::int64_t(0)});
                if (h.trials == 0)
                    continue;

                std::vector<double> deltas(h.trials, 0.0);
                parallel_for(h.trials, h.threads, [&](std::size_t t)
                {
                    // Words and phases come from a cell-independent stream so
                    // every cell sees the same draw sequence; the channel and
                    // noise stream is keyed by the cell.
                    rng shared = rng::for_trial(h.seed, t, stream_shared_draws);
                    codeword bob_word = random_word(book, shared);
                    codeword ava_word = random_word(book, shared);
                    while (ava_word == bob_word)
                        ava_word = random_word(book, shared);
                    pilot_schedule sched =
                        build_schedule(alphabet, shared, sc.phase_step,
                                       std::sqrt(sc.rho_b), sc.symbols);
                    // Phase draws whose differential sequence equals the
                    // public ramp make x2 collinear with x1 and the tie-break
                    // identically zero; the receive chain routes those trials
                    // to pattern decomposition before any delta-f evaluation,
                    // so the sweep redraws them to sample the tie-break's
                    // actual conditional input.
                    std::vector<double> ava_phases(sc.symbols);
                    for (;;)
                    {
                        bool ramp_collinear = true;
                        for (std::size_t k = 0; k < sc.symbols; k++)
                            ava_phases[k] = alphabet.phase(
                                shared.uniform_int(alphabet.resolution));
                        for (std::size_t k = 0; k + 1 < sc.symbols; k++)
                            if (std::abs(wrap_angle(ava_phases[k + 1] -
                                                    ava_phases[k] -
                                                    sc.phase_step)) > 1e-9)
                                ramp_collinear = false;
                        if (!ramp_collinear)
                            break;
                    }

                    rng cellr = rng::for_trial(h.seed, t, cell_stream(cell, 0));
                    channel_realization chan =
                        sample_cir(b1.factor, b2.factor, sc.taps, cellr);

                    bob_transmit bob{sched, codeword_to_sap(bob_word, psi_b), psi_b};
                    attacker_config att;
                    att.mode = attack_mode::spoof;
                    att.power = power;
                    att.book = &book;
                    att.fixed_sap = codeword_to_sap(ava_word, psi_b);
                    att.fixed_phases = ava_phases;
                    received_grid rx =
                        transmit(bob, att, chan, sc.n_fft, noise_var, cellr);

                    std::vector<std::size_t> overlap = intersect_sorted(
                        bob.pattern.active, att.fixed_sap->active);
                    dft_submatrix f =
                        make_dft_submatrix(sc.n_fft, sc.taps, to_uvec(overlap));
                    eigen_structure cf_eig =
                        eigendecompose_hermitian(fs_covariance(f, chan.pdp));

                    arma::cx_vec x1(2), x2(2);
                    x1(0) = sched.pilot(0);
                    x1(1) = sched.pilot(1);
                    x2(0) = rx.truth.ava_values(0, 0);
                    x2(1) = rx.truth.ava_values(0, 1);
                    estimation_result est = lmmse_estimate(rx, x1, x2, overlap,
                                                           covariance_mode::sample);
                    deltas[t] = delta_f(est, b1.eig, cf_eig, sc.n_t);
                });

                const mean_stderr ms = summarize(deltas);
                double band = 0.0, agree = 0.0;
                for (double d : deltas)
                {
                    if (std::abs(d) <= tol)
                        band += 1.0;
                    if ((d > 0.0) == (asym > 0.0))
                        agree += 1.0;
                }
                const double n = double(h.trials);
                table.add_row({grid[i1], grid[i2], std::string("deltaf_mc_mean"),
                               ms.mean, ms.stderr_of_mean, std::int64_t(h.trials)});
                table.add_row({grid[i1], grid[i2], std::string("iep_event_rate"),
                               band / n, rate_stderr(band, n), std::int64_t(h.trials)});
                if (std::abs(asym) > tol)
                    table.add_row({grid[i1], grid[i2], std::string("sign_agreement"),
                                   agree / n, rate_stderr(agree, n),
                                   std::int64_t(h.trials)});
            }
        }
        return table;
    }

    // ---------- IEP CURVE ----------

    result_table run_iep_curve(config &cfg)
    {
        run_header h = read_header(cfg, 0);
        const std::vector<std::int64_t> l_list =
            cfg.get_int_list("sweep", "l_list", {8, 10, 12});
        const std::size_t n_b_min = cfg.get_uint("sweep", "n_b_min", 0);
        const std::size_t n_b_max = cfg.get_uint("sweep", "n_b_max", 221);
        const std::size_t mc_max = cfg.get_uint("sweep", "mc_max_n_b", 20);
        const std::size_t k_grid = cfg.get_uint("scenario", "k_grid", 20);
        if (k_grid == 0)
            throw config_error("scenario: k_grid must be positive");
        if (mc_max > 63)
            throw config_error("sweep: mc_max_n_b must be at most 63");

        result_table table;
        echo_metadata(table, cfg, h, "iep_curve");
        table.set_columns({"l", "n_b", "metric", "value", "stderr", "trials"});

        std::size_t cell = 0;
        for (std::int64_t lv : l_list)
        {
            if (lv < 1)
                throw config_error("sweep: l_list entries must be positive");
            const std::size_t l = std::size_t(lv);
            for (std::size_t n_b = std::max(n_b_min, l); n_b <= n_b_max; n_b++)
            {
                if ((n_b + l) % 2 != 0)
                    continue;
                const iep_report rep = theoretical_iep(n_b, l);
                table.add_row({std::int64_t(l), std::int64_t(n_b),
                               std::string("iep"), rep.p_i, 0.0, std::int64_t(0)});
                table.add_row({std::int64_t(l), std::int64_t(n_b),
                               std::string("iep_dpd"), rep.p_i / double(k_grid), 0.0,
                               std::int64_t(0)});

                if (h.trials > 0 && n_b <= mc_max)
                {
                    const codebook book(n_b, l);
                    const std::size_t w = book.weight();
                    std::vector<std::uint8_t> hit(h.trials, 0), hit_dpd(h.trials, 0);
                    const std::size_t this_cell = cell;
                    parallel_for(h.trials, h.threads, [&](std::size_t t)
                    {
                        rng r = rng::for_trial(h.seed, t, cell_stream(this_cell, 0));
                        const codeword bob = random_word(book, r);
                        const std::uint64_t pattern =
                            r.uniform_int(std::uint64_t(1) << n_b);
                        const bool confusion =
                            std::size_t(std::popcount(pattern)) == w &&
                            pattern != bob.mask();
                        const std::uint64_t g1 = r.uniform_int(k_grid);
                        const std::uint64_t g2 = r.uniform_int(k_grid);
                        const bool coin = r.uniform_int(2) == 0;
                        hit[t] = confusion && coin;
                        hit_dpd[t] = confusion && (g1 == g2) && coin;
                    });
                    double s = 0.0, s_dpd = 0.0;
                    for (std::size_t t = 0; t < h.trials; t++)
                    {
                        s += hit[t];
                        s_dpd += hit_dpd[t];
                    }
                    const double n = double(h.trials);
                    table.add_row({std::int64_t(l), std::int64_t(n_b),
                                   std::string("iep_mc"), s / n, rate_stderr(s, n),
                                   std::int64_t(h.trials)});
                    table.add_row({std::int64_t(l), std::int64_t(n_b),
                                   std::string("iep_dpd_mc"), s_dpd / n,
                                   rate_stderr(s_dpd, n), std::int64_t(h.trials)});
                }
                cell++;
            }
        }
        return table;
    }

    // ---------- NMSE CURVE ----------

    result_table run_nmse_curve(config &cfg)
    {
        scenario sc;
        sc.n_fft = 256;
        sc.n_b = 256;
        sc.taps = 6;
        sc.code_order = 6;
        read_scenario(cfg, sc);
        run_header h = read_header(cfg, 2000);
        const std::uint64_t ls_trials = cfg.get_uint("sweep", "ls_trials", 2000);
        const std::vector<std::int64_t> n_t_list =
            cfg.get_int_list("sweep", "n_t_list", {16, 64, 256});
        const std::vector<double> snr_list = cfg.get_double_list(
            "sweep", "snr_db_list", {0.0, 10.0, 20.0, 30.0, 40.0});
        const double power = cfg.get_double("attacker", "power", 1.0);
        if (n_t_list.empty() || snr_list.empty())
            throw config_error("sweep: n_t_list and snr_db_list must be nonempty");

        result_table table;
        echo_metadata(table, cfg, h, "nmse_curve");
        table.set_columns({"n_t", "snr_db", "metric", "value", "stderr", "trials"});

        const codebook book(sc.n_b, sc.code_order);
        const phase_alphabet alphabet(sc.phase_resolution);
        const std::vector<std::size_t> psi_b = default_psi_b(sc.n_fft, sc.n_b);
        sap full_set;
        full_set.active = psi_b;

        // The conventional schedule is the public deterministic ramp; its
        // initial offset is not drawn.
        pilot_schedule conventional;
        conventional.initial_phase_index = 0;
        conventional.initial_phase = alphabet.phase(0);
        conventional.phase_step = sc.phase_step;
        conventional.amplitude = std::sqrt(sc.rho_b);
        conventional.symbols = sc.symbols;

        std::map<std::size_t, std::pair<angle_block, angle_block>> blocks;
        for (std::int64_t ntv : n_t_list)
        {
            if (ntv < 1)
                throw config_error("sweep: n_t_list entries must be positive");
            const std::size_t n_t = std::size_t(ntv);
            if (!blocks.count(n_t))
                blocks.emplace(n_t, std::make_pair(
                    make_angle_block(sc.theta1, sc.spread, sc.spacing, n_t),
                    make_angle_block(sc.theta2, sc.spread, sc.spacing, n_t)));
        }

        std::size_t cell = 0;
        for (std::int64_t ntv : n_t_list)
        {
            const std::size_t n_t = std::size_t(ntv);
            const angle_block &b1 = blocks.at(n_t).first;
            const angle_block &b2 = blocks.at(n_t).second;
            for (double snr_db : snr_list)
            {
                const double noise_var =
                    sc.rho_b / std::pow(10.0, snr_db / 10.0);
                const std::size_t this_cell = cell;

                // Conventional least squares, mimicked and clean.
                std::vector<double> ls_attack(ls_trials, 0.0);
                std::vector<double> ls_clean(ls_trials, 0.0);
                parallel_for(ls_trials, h.threads, [&](std::size_t t)
                {
                    attacker_config mimic;
                    mimic.mode = attack_mode::spoof;
                    mimic.power = power;
                    mimic.saps = sap_strategy::mimic_bob;
                    mimic.phases = phase_strategy::copy_bob;

                    rng ra = rng::for_trial(h.seed, t, cell_stream(this_cell, 0));
                    channel_realization chan =
                        sample_cir(b1.factor, b2.factor, sc.taps, ra);
                    received_grid rx = transmit({conventional, full_set, psi_b},
                                                mimic, chan, sc.n_fft, noise_var, ra);
                    arma::cx_mat est =
                        ls_baseline_estimate(rx, conventional, psi_b, sc.taps);
                    ls_attack[t] =
                        frob2(est - chan.bob_cirs) / frob2(chan.bob_cirs);

                    attacker_config silent;
                    rng rb = rng::for_trial(h.seed, t, cell_stream(this_cell, 1));
                    channel_realization chan2 =
                        sample_cir(b1.factor, b2.factor, sc.taps, rb);
                    received_grid rx2 = transmit({conventional, full_set, psi_b},
                                                 silent, chan2, sc.n_fft, noise_var,
                                                 rb);
                    arma::cx_mat est2 =
                        ls_baseline_estimate(rx2, conventional, psi_b, sc.taps);
                    ls_clean[t] =
                        frob2(est2 - chan2.bob_cirs) / frob2(chan2.bob_cirs);
                });

                // Coded uplink under a pattern-mimicking spoof: the sample-
                // covariance LMMSE against the exact-covariance benchmark on
                // the same grids, reported in the CIR domain.
                std::vector<double> lm(h.trials, 0.0), pf(h.trials, 0.0),
                    gap(h.trials, 0.0);
                parallel_for(h.trials, h.threads, [&](std::size_t t)
                {
                    rng shared = rng::for_trial(h.seed, t, stream_shared_draws);
                    codeword bob_word = random_word(book, shared);
                    pilot_schedule sched =
                        build_schedule(alphabet, shared, sc.phase_step,
                                       std::sqrt(sc.rho_b), sc.symbols);
                    std::vector<double> ava_phases(sc.symbols);
                    for (std::size_t k = 0; k < sc.symbols; k++)
                        ava_phases[k] =
                            alphabet.phase(shared.uniform_int(alphabet.resolution));

                    rng rc = rng::for_trial(h.seed, t, cell_stream(this_cell, 2));
                    channel_realization chan =
                        sample_cir(b1.factor, b2.factor, sc.taps, rc);

                    bob_transmit bob{sched, codeword_to_sap(bob_word, psi_b), psi_b};
                    attacker_config att;
                    att.mode = attack_mode::spoof;
                    att.power = power;
                    att.fixed_sap = bob.pattern;
                    att.fixed_phases = ava_phases;
                    const std::vector<std::size_t> &overlap = bob.pattern.active;
                    received_grid rx = transmit(bob, att, chan, sc.n_fft, noise_var,
                                                rc, &overlap);

                    arma::cx_vec x1(2), x2(2);
                    x1(0) = sched.pilot(0);
                    x1(1) = sched.pilot(1);
                    x2(0) = rx.truth.ava_values(0, 0);
                    x2(1) = rx.truth.ava_values(0, 1);
                    estimation_result est_s = lmmse_estimate(
                        rx, x1, x2, overlap, covariance_mode::sample);
                    estimation_result est_e = lmmse_estimate(
                        rx, x1, x2, overlap, covariance_mode::exact);

                    // Back to the CIR domain through the overlap DFT slice.
                    dft_submatrix f =
                        make_dft_submatrix(sc.n_fft, sc.taps, to_uvec(overlap));
                    arma::cx_mat f_pinv = arma::pinv(f.matrix);
                    const std::size_t s_eff = overlap.size();
                    arma::cx_mat stack_s(est_s.h_bob_fs.st());
                    arma::cx_mat stack_e(est_e.h_bob_fs.st());
                    arma::cx_mat cir_s =
                        f_pinv * arma::reshape(stack_s, s_eff, n_t);
                    arma::cx_mat cir_e =
                        f_pinv * arma::reshape(stack_e, s_eff, n_t);
                    const double den = frob2(chan.bob_cirs);
                    lm[t] = frob2(cir_s - chan.bob_cirs.st()) / den;
                    pf[t] = frob2(cir_e - chan.bob_cirs.st()) / den;
                    gap[t] = lm[t] - pf[t];
                });

                const mean_stderr m_attack = summarize(ls_attack);
                const mean_stderr m_clean = summarize(ls_clean);
                const mean_stderr m_lm = summarize(lm);
                const mean_stderr m_pf = summarize(pf);
                const mean_stderr m_gap = summarize(gap);
                table.add_row({std::int64_t(n_t), snr_db,
                               std::string("nmse_ls_attack"), m_attack.mean,
                               m_attack.stderr_of_mean, std::int64_t(ls_trials)});
                table.add_row({std::int64_t(n_t), snr_db,
                               std::string("nmse_ls_clean"), m_clean.mean,
                               m_clean.stderr_of_mean, std::int64_t(ls_trials)});
                table.add_row({std::int64_t(n_t), snr_db,
                               std::string("nmse_lmmse"), m_lm.mean,
                               m_lm.stderr_of_mean, std::int64_t(h.trials)});
                table.add_row({std::int64_t(n_t), snr_db,
                               std::string("nmse_perfect"), m_pf.mean,
                               m_pf.stderr_of_mean, std::int64_t(h.trials)});
                table.add_row({std::int64_t(n_t), snr_db,
                               std::string("nmse_gap"), m_gap.mean,
                               m_gap.stderr_of_mean, std::int64_t(h.trials)});
                cell++;
            }
        }
        return table;
    }

    // ---------- IEP MONTE CARLO ----------

    result_table run_iep_montecarlo(config &cfg)
    {
        scenario sc;
        sc.n_fft = 16;
        sc.n_b = 9;
        sc.taps = 3;
        sc.code_order = 3;
        sc.symbols = 3;
        read_scenario(cfg, sc);
        run_header h = read_header(cfg, 10000);
        const std::string mode = cfg.get_string("montecarlo", "mode", "signal");
        const std::string aoa = cfg.get_string("montecarlo", "aoa", "cpd");
        const double theta_min =
            cfg.get_double("montecarlo", "theta_min", -pi / 4.0);
        const double theta_max =
            cfg.get_double("montecarlo", "theta_max", pi / 4.0);
        if (mode != "signal" && mode != "oracle_confusion")
            throw config_error("montecarlo: mode must be signal or oracle_confusion");
        if (aoa != "dpd" && aoa != "cpd")
            throw config_error("montecarlo: aoa must be dpd or cpd");
        if (!(theta_max > theta_min))
            throw config_error("montecarlo: theta_max must exceed theta_min");
        if (h.trials == 0)
            throw config_error("experiment: trials must be positive");

        attacker_config att;
        att.mode = parse_attack_mode(cfg.get_string("attacker", "mode", "spoof"));
        att.power = cfg.get_double("attacker", "power", 1.0);
        att.saps = parse_sap_strategy(
            cfg.get_string("attacker", "sap", "arbitrary_random_pattern"));
        att.phases = parse_phase_strategy(
            cfg.get_string("attacker", "phases", "random_quantized"));
        att.victim_fraction = cfg.get_double("attacker", "victim_fraction", 0.5);
        att.phase_resolution = sc.phase_resolution;
        const bool genie = cfg.get_bool("attacker", "genie", true);

        const bool dpd = aoa == "dpd";
        const codebook book(sc.n_b, sc.code_order);
        att.book = &book;
        const phase_alphabet alphabet(sc.phase_resolution);
        const std::vector<std::size_t> psi_b = default_psi_b(sc.n_fft, sc.n_b);
        const double noise_var = sc.noise_var();
        const iep_report theory = theoretical_iep(sc.n_b, sc.taps);

        result_table table;
        echo_metadata(table, cfg, h, "iep_montecarlo");
        table.set_columns({"n_b", "l", "metric", "value", "stderr", "trials"});
        auto add = [&](const std::string &metric, double value, double se,
                       std::int64_t trials)
        {
            table.add_row({std::int64_t(sc.n_b), std::int64_t(sc.taps), metric,
                           value, se, trials});
        };
        add("iep_theory", dpd ? theory.p_i / double(sc.k_grid) : 0.0, 0.0, 0);
        add("iep_theory_raw", theory.p_i, 0.0, 0);

        struct trial_flags
        {
            std::uint8_t iep = 0, decision_error = 0, ambiguous = 0;
            std::uint8_t identified = 0, no_attack = 0, error = 0;
        };
        std::vector<trial_flags> flags(h.trials);

        if (mode == "oracle_confusion")
        {
            if (sc.n_b > 63)
                throw config_error("montecarlo: oracle_confusion needs n_b <= 63");
            const std::size_t w = book.weight();
            parallel_for(h.trials, h.threads, [&](std::size_t t)
            {
                rng r = rng::for_trial(h.seed, t, cell_stream(0, 0));
                const codeword bob = random_word(book, r);
                const std::uint64_t pattern =
                    r.uniform_int(std::uint64_t(1) << sc.n_b);
                const bool confusion =
                    std::size_t(std::popcount(pattern)) == w &&
                    pattern != bob.mask();

                rng aoas = rng::for_trial(h.seed, t, stream_aoa);
                bool theta_eq;
                if (dpd)
                {
                    const std::uint64_t g1 = aoas.uniform_int(sc.k_grid);
                    const std::uint64_t g2 = aoas.uniform_int(sc.k_grid);
                    theta_eq = g1 == g2;
                }
                else
                {
                    const double t1 = aoas.uniform(theta_min, theta_max);
                    const double t2 = aoas.uniform(theta_min, theta_max);
                    theta_eq = t1 == t2;
                }
                rng coin_stream = rng::for_trial(h.seed, t, stream_coin);
                const bool coin = coin_stream.uniform_int(2) == 0;
                flags[t].ambiguous = confusion && theta_eq;
                flags[t].iep = confusion && theta_eq && coin;
                flags[t].decision_error = flags[t].iep;
                flags[t].identified = !flags[t].ambiguous;
            });
        }
        else
        {
            // Signal mode runs the whole receive chain per trial.
            std::vector<angle_block> grid_blocks;
            std::vector<double> grid_angles;
            if (dpd)
            {
                if (sc.k_grid == 0)
                    throw config_error("scenario: k_grid must be positive");
                for (std::size_t i = 0; i < sc.k_grid; i++)
                {
                    const double th =
                        sc.k_grid == 1
                            ? 0.5 * (theta_min + theta_max)
                            : theta_min + (theta_max - theta_min) * double(i) /
                                              double(sc.k_grid - 1);
                    grid_angles.push_back(th);
                    grid_blocks.push_back(
                        make_angle_block(th, sc.spread, sc.spacing, sc.n_t));
                }
            }

            const double tol_scale = 1e-3 * double(sc.taps);
            parallel_for(h.trials, h.threads, [&](std::size_t t)
            {
                rng aoas = rng::for_trial(h.seed, t, stream_aoa);
                angle_block local1, local2;
                const angle_block *b1;
                const angle_block *b2;
                if (dpd)
                {
                    b1 = &grid_blocks[std::size_t(aoas.uniform_int(sc.k_grid))];
                    b2 = &grid_blocks[std::size_t(aoas.uniform_int(sc.k_grid))];
                }
                else
                {
                    local1 = make_angle_block(aoas.uniform(theta_min, theta_max),
                                              sc.spread, sc.spacing, sc.n_t);
                    local2 = make_angle_block(aoas.uniform(theta_min, theta_max),
                                              sc.spread, sc.spacing, sc.n_t);
                    b1 = &local1;
                    b2 = &local2;
                }

                rng r = rng::for_trial(h.seed, t, cell_stream(0, 0));
                const codeword bob_word = random_word(book, r);
                pilot_schedule sched = build_schedule(
                    alphabet, r, sc.phase_step, std::sqrt(sc.rho_b), sc.symbols);
                channel_realization chan =
                    sample_cir(b1->factor, b2->factor, sc.taps, r);
                bob_transmit bob{sched, codeword_to_sap(bob_word, psi_b), psi_b};
                received_grid rx =
                    transmit(bob, att, chan, sc.n_fft, noise_var, r);

                detector_config det;
                det.target_pf = sc.detector_pf;
                det.noise_var = noise_var;
                det.symbols_used = std::min<std::size_t>(3, sc.symbols);
                const std::vector<std::uint8_t> observed = detect_sap(rx, det);

                separation_options opts;
                opts.phase_resolution = sc.phase_resolution;
                const separation_result sep = separate_codewords(
                    rx, observed, sc.phase_step, book, opts);
                identification_outcome out = identify(sep, book);

                if (out.status == identification_status::ambiguous)
                {
                    std::vector<std::size_t> overlap;
                    for (std::size_t i = 0; i < sep.per_subcarrier_class.size(); i++)
                        if (sep.per_subcarrier_class[i] == subcarrier_class::both)
                            overlap.push_back(psi_b[i]);
                    const bool genie_ready =
                        genie && !rx.truth.ava_values.is_empty() &&
                        rx.truth.ava_values.n_cols >= 2;
                    if (!overlap.empty() && genie_ready)
                    {
                        dft_submatrix f = make_dft_submatrix(sc.n_fft, sc.taps,
                                                             to_uvec(overlap));
                        eigen_structure cf_eig =
                            eigendecompose_hermitian(fs_covariance(f, chan.pdp));
                        // Estimation window: the first adjacent symbol pair on
                        // which the two hypothesized pilots are not collinear.
                        // Proportional pilots make the two estimates equal and
                        // delta-f identically zero, so such a window carries
                        // no decision information.
                        const std::size_t windows = rx.truth.ava_values.n_cols - 1;
                        std::size_t k0 = 0;
                        arma::cx_vec x1(2), x2(2);
                        for (std::size_t k = 0; k < windows; k++)
                        {
                            x1(0) = sched.pilot(k);
                            x1(1) = sched.pilot(k + 1);
                            x2(0) = rx.truth.ava_values(0, k);
                            x2(1) = rx.truth.ava_values(0, k + 1);
                            const double cross =
                                std::abs(x1(0) * x2(1) - x1(1) * x2(0));
                            k0 = k;
                            if (cross > 1e-9 * std::abs(x1(0)) * std::abs(x2(0)))
                                break;
                        }
                        x1(0) = sched.pilot(k0);
                        x1(1) = sched.pilot(k0 + 1);
                        x2(0) = rx.truth.ava_values(0, k0);
                        x2(1) = rx.truth.ava_values(0, k0 + 1);
                        estimation_result est = lmmse_estimate(
                            rx, x1, x2, overlap, covariance_mode::sample, k0);
                        const double d = delta_f(est, b1->eig, cf_eig, sc.n_t);
                        const double tol = tol_scale * double(b1->eig.rank());
                        out = enhance_identification(out, d, tol);
                    }
                }

                trial_flags &fl = flags[t];
                fl.iep = out.iep_event;
                fl.ambiguous = out.status == identification_status::ambiguous;
                fl.identified = out.status == identification_status::identified;
                fl.no_attack = out.status == identification_status::no_attack;
                fl.error = out.status == identification_status::error;
                if (out.status == identification_status::identified)
                {
                    const std::optional<codeword> &concluded =
                        out.chosen == hypothesis::h1 ? out.candidate_other
                                                     : out.candidate_bob;
                    fl.decision_error = !concluded || *concluded != bob_word;
                }
            });
        }

        double iep = 0.0, dec = 0.0, amb = 0.0, ident = 0.0, na = 0.0, err = 0.0;
        for (const trial_flags &fl : flags)
        {
            iep += fl.iep;
            dec += fl.decision_error;
            amb += fl.ambiguous;
            ident += fl.identified;
            na += fl.no_attack;
            err += fl.error;
        }
        const double n = double(h.trials);
        const std::int64_t tn = std::int64_t(h.trials);
        add("iep_event_rate", iep / n, rate_stderr(iep, n), tn);
        add("decision_error_rate", dec / n, rate_stderr(dec, n), tn);
        add("ambiguous_rate", amb / n, rate_stderr(amb, n), tn);
        add("identified_rate", ident / n, rate_stderr(ident, n), tn);
        add("no_attack_rate", na / n, rate_stderr(na, n), tn);
        add("error_rate", err / n, rate_stderr(err, n), tn);
        return table;
    }

    // ---------- DISPATCH ----------

    result_table run_experiment(const std::string &name, config &cfg)
    {
        const std::string pinned = cfg.get_string("experiment", "name", name);
        if (pinned != name)
            throw config_error("config pins experiment '" + pinned +
                               "' but '" + name + "' was requested");

        result_table table;
        if (name == "deltaf_sweep")
            table = run_deltaf_sweep(cfg);
        else if (name == "iep_curve")
            table = run_iep_curve(cfg);
        else if (name == "nmse_curve")
            table = run_nmse_curve(cfg);
        else if (name == "iep_montecarlo")
            table = run_iep_montecarlo(cfg);
        else
            throw config_error("unknown experiment '" + name + "'");
        cfg.ensure_all_consumed();
        return table;
    }
}
