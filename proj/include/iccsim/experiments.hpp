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

#ifndef iccsim_experiments_H
#define iccsim_experiments_H

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "iccsim/config.hpp"
#include "iccsim/csv.hpp"

namespace iccsim
{
    // ---------- EXPERIMENTS ----------

    // Each runner consumes its keys from the parsed config, runs the seeded
    // sweep, and returns the result table with the config echoed into the
    // metadata block. Config problems raise config_error.
    result_table run_deltaf_sweep(config &cfg);
    result_table run_iep_curve(config &cfg);
    result_table run_nmse_curve(config &cfg);
    result_table run_iep_montecarlo(config &cfg);

    // Dispatch by experiment name; also verifies [experiment] name when the
    // config pins one. Checks for unconsumed keys before returning.
    result_table run_experiment(const std::string &name, config &cfg);

    inline const char *const experiment_names[] = {
        "deltaf_sweep", "iep_curve", "nmse_curve", "iep_montecarlo"};

    // ---------- SUPPORT ----------

    // Runs body(0..n-1) on `threads` workers pulling indices from a shared
    // counter; bodies write only their own slots, so results do not depend on
    // the schedule. threads <= 1 runs inline.
    void parallel_for(std::size_t n, std::size_t threads,
                      const std::function<void(std::size_t)> &body);

    // Mean and standard error of the mean over a sample.
    struct mean_stderr
    {
        double mean = 0.0, stderr_of_mean = 0.0;
    };
    mean_stderr summarize(const std::vector<double> &xs);

    // One-sided upper 95% Clopper-Pearson bound for a binomial proportion.
    double binomial_upper_bound95(std::uint64_t successes, std::uint64_t trials);

    // Named RNG streams; cell-dependent streams add a cell offset so shared
    // draws stay identical across sweep cells (common random numbers).
    enum : std::uint64_t
    {
        stream_shared_draws = 1, // codewords and pilot phases
        stream_aoa = 2,          // mean-AoA draws
        stream_coin = 3,         // oracle-mode tie-break coins
        stream_cell_base = 16    // per-cell block: channel, noise, attacker
    };
    constexpr std::uint64_t cell_stream(std::size_t cell, std::uint64_t which)
    {
        return stream_cell_base + 4 * std::uint64_t(cell) + which;
    }
}

#endif
