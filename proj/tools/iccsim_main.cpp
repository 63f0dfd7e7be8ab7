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

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "iccsim/common.hpp"
#include "iccsim/config.hpp"
#include "iccsim/csv.hpp"
#include "iccsim/experiments.hpp"
#include "iccsim/icc_code.hpp"

namespace
{
    struct cli_options
    {
        std::string config_path;
        std::string out_path;
        std::string codebook_path;
        std::uint64_t seed = 0;
        std::uint64_t trials = 0;
        std::uint64_t threads = 0;
        bool seed_given = false, trials_given = false, threads_given = false;
    };

    // exit 0: success, 2: configuration or usage problem, 3: runtime failure
    int run(const std::string &experiment, cli_options &opt)
    {
        try
        {
            iccsim::config cfg = iccsim::config::parse_file(opt.config_path);
            if (opt.seed_given)
                cfg.set("experiment", "seed", std::to_string(opt.seed));
            if (opt.trials_given)
                cfg.set("experiment", "trials", std::to_string(opt.trials));
            if (opt.threads_given)
                cfg.set("experiment", "threads", std::to_string(opt.threads));
            else if (const char *env = std::getenv("ICCSIM_THREADS"))
                cfg.set("experiment", "threads", env);

            if (!opt.codebook_path.empty())
            {
                const std::size_t n_b = cfg.get_uint("scenario", "n_b", 12);
                const std::size_t s = cfg.get_uint("scenario", "code_order", 4);
                iccsim::codebook book(n_b, s);
                std::ofstream out(opt.codebook_path, std::ios::binary);
                if (!out)
                    throw std::runtime_error("cannot open codebook output '" +
                                             opt.codebook_path + "'");
                book.write_text(out);
                if (!out.flush())
                    throw std::runtime_error("cannot write codebook output '" +
                                             opt.codebook_path + "'");
                std::cout << "codebook (" << n_b << ", " << s << ") written to "
                          << opt.codebook_path << "\n";
                return 0;
            }

            std::string out_path = opt.out_path;
            if (out_path.empty())
                out_path = cfg.get_string("experiment", "output",
                                          experiment + ".csv");
            else
                cfg.get_string("experiment", "output", ""); // CLI wins; consume

            iccsim::result_table table = iccsim::run_experiment(experiment, cfg);
            table.write_file(out_path);
            std::cout << experiment << ": " << table.rows().size()
                      << " rows written to " << out_path << "\n";
            return 0;
        }
        catch (const iccsim::config_error &e)
        {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
        catch (const std::exception &e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return 3;
        }
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"independence-checking-coded uplink training simulator"};
    app.require_subcommand(1);

    cli_options opt;
    std::string chosen;
    for (const char *name : iccsim::experiment_names)
    {
        CLI::App *sub = app.add_subcommand(name, std::string("run the ") + name +
                                                     " experiment");
        sub->add_option("--config", opt.config_path, "configuration file")
            ->required();
        sub->add_option("--seed", opt.seed, "master seed override")
            ->each([&](const std::string &) { opt.seed_given = true; });
        sub->add_option("--trials", opt.trials, "trial count override")
            ->each([&](const std::string &) { opt.trials_given = true; });
        sub->add_option("--threads", opt.threads, "worker thread count")
            ->each([&](const std::string &) { opt.threads_given = true; });
        sub->add_option("--out", opt.out_path, "output CSV path");
        sub->add_option("--emit-codebook", opt.codebook_path,
                        "write the scenario codebook as text and exit");
        sub->callback([&chosen, name]() { chosen = name; });
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        if (e.get_exit_code() == 0)
            return app.exit(e); // help
        app.exit(e);
        return 2;
    }

    return run(chosen, opt);
}
