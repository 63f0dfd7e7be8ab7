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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "iccsim/common.hpp"
#include "iccsim/experiments.hpp"
#include "test_support.hpp"

using namespace iccsim;

namespace
{
    const std::filesystem::path work_dir = "/tmp/iccsim_cli_test";

    std::string read_file(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }

    void write_file(const std::filesystem::path &p, const std::string &text)
    {
        std::ofstream out(p, std::ios::binary);
        out << text;
    }

    // Exit code of the iccsim binary on the given arguments, stdout and
    // stderr discarded. The binary path comes from the test environment.
    int run_cli(const std::string &args)
    {
        const char *bin = std::getenv("ICCSIM_BIN");
        if (!bin)
            return -1;
        std::string cmd = std::string("'") + bin + "' " + args +
                          " > /dev/null 2> /dev/null";
        int status = std::system(cmd.c_str());
        if (status == -1 || !WIFEXITED(status))
            return -2;
        return WEXITSTATUS(status);
    }

    std::vector<std::string> split_lines(const std::string &text)
    {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (start < text.size())
        {
            std::size_t stop = text.find('\n', start);
            if (stop == std::string::npos)
                stop = text.size();
            out.push_back(text.substr(start, stop - start));
            start = stop + 1;
        }
        return out;
    }
}

static void test_config_parsing()
{
    config cfg = config::parse_text(
        "# leading comment\n"
        "[scenario]\n"
        "n_t = 64\n"
        "snr_db = 12.5\n"
        "flag = true\n"
        "  spaced   =   keeps inner  text  \n"
        "[sweep]\n"
        "theta_grid = -0.3, 0.0, 0.3\n"
        "l_list = 8, 10, 12\n");
    CHECK(cfg.has("scenario", "n_t"));
    CHECK(!cfg.has("scenario", "missing"));
    CHECK(cfg.get_uint("scenario", "n_t", 0) == 64);
    CHECK(cfg.get_double("scenario", "snr_db", 0.0) == 12.5);
    CHECK(cfg.get_bool("scenario", "flag", false));
    CHECK(cfg.get_string("scenario", "spaced", "") == "keeps inner  text");
    std::vector<double> grid = cfg.get_double_list("sweep", "theta_grid", {});
    CHECK(grid.size() == 3 && grid[0] == -0.3 && grid[2] == 0.3);
    std::vector<std::int64_t> ls = cfg.get_int_list("sweep", "l_list", {});
    CHECK(ls.size() == 3 && ls[1] == 10);

    // Fallbacks for absent keys.
    CHECK(cfg.get_double("scenario", "absent", 2.25) == 2.25);
    CHECK(cfg.get_string("scenario", "absent2", "dflt") == "dflt");

    // Every key was consumed.
    cfg.ensure_all_consumed();
}

static void test_config_errors()
{
    config bad_num = config::parse_text("[a]\nx = not-a-number\n");
    CHECK_THROWS(bad_num.get_double("a", "x", 0.0), config_error);

    config bad_int = config::parse_text("[a]\nx = 3.5\n");
    CHECK_THROWS(bad_int.get_int("a", "x", 0), config_error);

    config bad_bool = config::parse_text("[a]\nx = maybe\n");
    CHECK_THROWS(bad_bool.get_bool("a", "x", false), config_error);

    config missing = config::parse_text("[a]\nx = 1\n");
    CHECK_THROWS(missing.require_string("a", "y"), config_error);

    CHECK_THROWS(config::parse_text("[a]\nno equals sign\n"), config_error);

    // Unconsumed keys are named in the error.
    config leftover = config::parse_text("[scenario]\nn_t = 8\nmistyped = 1\n");
    leftover.get_uint("scenario", "n_t", 0);
    try
    {
        leftover.ensure_all_consumed();
        CHECK_MSG(false, "ensure_all_consumed accepted a leftover key");
    }
    catch (const config_error &e)
    {
        CHECK(std::string(e.what()).find("mistyped") != std::string::npos);
    }

    config empty_list = config::parse_text("[a]\nx = ,\n");
    CHECK_THROWS(empty_list.get_double_list("a", "x", {}), config_error);
}

static void test_config_serialize_round_trip()
{
    const std::string text =
        "[experiment]\n"
        "seed = 11\n"
        "trials = 100\n"
        "[scenario]\n"
        "n_t = 32\n"
        "snr_db = 17.25\n";
    config cfg = config::parse_text(text);
    CHECK(cfg.serialize() == text);
    config again = config::parse_text(cfg.serialize());
    CHECK(again.serialize() == text);

    // set() replaces in place or appends to the section.
    cfg.set("experiment", "seed", "12");
    cfg.set("experiment", "threads", "2");
    std::string out = cfg.serialize();
    CHECK(out.find("seed = 12") != std::string::npos);
    CHECK(out.find("threads = 2") != std::string::npos);
    config reparsed = config::parse_text(out);
    CHECK(reparsed.serialize() == out);
}

static void test_format_double()
{
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.5) == "-2.5");
    // Shortest representation still round-trips exactly.
    for (double v : {1.0 / 3.0, 0.0775, 6.02e23, -1.25e-7, 3.141592653589793})
        CHECK(std::stod(format_double(v)) == v);
}

static void test_result_table_format()
{
    result_table t;
    t.add_metadata("[meta]");
    t.add_metadata("note = golden");
    t.set_columns({"a", "b", "c"});
    t.add_row({std::string("x"), std::int64_t(3), 0.5});
    t.add_row({std::string("y"), std::int64_t(-1), 1.0 / 3.0});
    const std::string want = "# [meta]\n# note = golden\na,b,c\nx,3,0.5\ny,-1," +
                             format_double(1.0 / 3.0) + "\n";
    CHECK(t.to_csv() == want);

    std::filesystem::create_directories(work_dir);
    const auto path = work_dir / "golden.csv";
    t.write_file(path.string());
    CHECK(read_file(path) == want);
}

static void test_summarize_and_bounds()
{
    mean_stderr ms = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK_CLOSE(ms.mean, 2.5, 1e-12);
    CHECK_CLOSE(ms.stderr_of_mean, std::sqrt((5.0 / 3.0) / 4.0), 1e-12);
    mean_stderr single = summarize({7.0});
    CHECK(single.mean == 7.0);
    CHECK(single.stderr_of_mean == 0.0);

    // Upper 95% Clopper-Pearson bounds against an independent
    // arbitrary-precision oracle.
    CHECK(binomial_upper_bound95(7, 7) == 1.0);
    CHECK_CLOSE(binomial_upper_bound95(0, 10000), 0.00029952835977661201, 1e-9);
    CHECK_CLOSE(binomial_upper_bound95(0, 100), 0.029513049607039935, 1e-9);
    CHECK_CLOSE(binomial_upper_bound95(5, 100), 0.10225337764327451, 1e-9);
    CHECK_CLOSE(binomial_upper_bound95(3, 10000), 0.00077518137901009985, 1e-9);
    CHECK_CLOSE(binomial_upper_bound95(50, 1000), 0.062863403512379738, 1e-9);
}

static void test_parallel_for()
{
    std::vector<std::size_t> out(997, 0);
    parallel_for(out.size(), 3, [&](std::size_t i) { out[i] = i * i; });
    for (std::size_t i = 0; i < out.size(); i++)
        CHECK(out[i] == i * i);
    std::vector<std::size_t> inline_out(10, 0);
    parallel_for(inline_out.size(), 0, [&](std::size_t i) { inline_out[i] = i; });
    for (std::size_t i = 0; i < inline_out.size(); i++)
        CHECK(inline_out[i] == i);
}

static void test_experiment_dispatch()
{
    config cfg = config::parse_text("[experiment]\nname = iep_curve\n");
    CHECK_THROWS(run_experiment("deltaf_sweep", cfg), config_error);

    config cfg2 = config::parse_text("");
    CHECK_THROWS(run_experiment("unknown_thing", cfg2), config_error);

    // Unconsumed keys fail the run even when the experiment itself succeeds.
    config cfg3 = config::parse_text(
        "[experiment]\ntrials = 0\n[scenario]\nn_t = 16\ntyppo = 1\n"
        "[sweep]\ntheta_grid = 0.0\n");
    CHECK_THROWS(run_experiment("deltaf_sweep", cfg3), config_error);
}

static void test_stderr_scaling()
{
    // Reported standard errors follow the 1/sqrt(trials) law: quadrupling
    // the trials halves the stderr of the Monte Carlo rate, up to the
    // fluctuation of the rate estimate itself.
    auto mc_stderr = [](std::uint64_t trials) {
        std::ostringstream text;
        text << "[experiment]\nseed = 5\ntrials = " << trials
             << "\n[sweep]\nl_list = 3\nn_b_min = 9\nn_b_max = 9\n";
        config cfg = config::parse_text(text.str());
        result_table t = run_iep_curve(cfg);
        for (const auto &row : t.rows())
            if (std::get<std::string>(row[2]) == "iep_mc")
                return std::get<double>(row[4]);
        return -1.0;
    };
    double s1 = mc_stderr(1000);
    double s4 = mc_stderr(4000);
    CHECK(s1 > 0.0 && s4 > 0.0);
    double ratio = s1 / s4;
    CHECK_MSG(ratio > 1.6 && ratio < 2.5, "stderr ratio " + std::to_string(ratio));
}

static void test_library_determinism()
{
    const std::string text =
        "[experiment]\nseed = 9\ntrials = 25\n[scenario]\nn_t = 16\n"
        "[sweep]\ntheta_grid = -0.3, 0.3\n";
    config c1 = config::parse_text(text);
    config c2 = config::parse_text(text);
    result_table t1 = run_deltaf_sweep(c1);
    result_table t2 = run_deltaf_sweep(c2);
    CHECK(t1.to_csv() == t2.to_csv());

    config c3 = config::parse_text(
        "[experiment]\nseed = 10\ntrials = 25\n[scenario]\nn_t = 16\n"
        "[sweep]\ntheta_grid = -0.3, 0.3\n");
    result_table t3 = run_deltaf_sweep(c3);
    CHECK(t3.to_csv() != t1.to_csv());
}

static void test_cli_run_and_echo()
{
    std::filesystem::create_directories(work_dir);
    const auto cfg_path = work_dir / "sweep.cfg";
    const auto out_path = work_dir / "sweep.csv";
    write_file(cfg_path,
               "[experiment]\nseed = 3\ntrials = 0\n[scenario]\nn_t = 24\n"
               "[sweep]\ntheta_grid = -0.3, 0.3\n");
    std::filesystem::remove(out_path);

    int code = run_cli("deltaf_sweep --config '" + cfg_path.string() +
                       "' --out '" + out_path.string() + "'");
    CHECK_MSG(code == 0, "exit code " + std::to_string(code));
    std::string csv = read_file(out_path);
    CHECK(!csv.empty());
    CHECK(csv.back() == '\n');
    CHECK(csv.find('\r') == std::string::npos);

    std::vector<std::string> lines = split_lines(csv);
    CHECK(lines.size() > 5);
    CHECK(lines[0] == "# [meta]");
    CHECK(lines[1].rfind("# version = ", 0) == 0);
    CHECK(lines[2] == "# experiment = deltaf_sweep");
    CHECK(lines[3] == "# seed = 3");

    // The metadata block after the [meta] header is the config echo; it
    // reparses to the identical serialization (round trip).
    std::string echo;
    std::size_t header_row = 0;
    for (std::size_t i = 4; i < lines.size(); i++)
    {
        if (lines[i].rfind("# ", 0) == 0)
            echo += lines[i].substr(2) + "\n";
        else
        {
            header_row = i;
            break;
        }
    }
    config echoed = config::parse_text(echo);
    CHECK(echoed.serialize() == echo);
    CHECK(echoed.get_uint("experiment", "seed", 0) == 3);
    CHECK(echoed.get_uint("scenario", "n_t", 0) == 24);

    CHECK(lines[header_row] == "theta1,theta2,metric,value,stderr,trials");
    // 2 x 2 grid, three asymptotic rows per cell, no Monte Carlo rows.
    CHECK(lines.size() - header_row - 1 == 12);
}

static void test_cli_exit_codes()
{
    std::filesystem::create_directories(work_dir);

    // Usage problem: missing required --config.
    CHECK(run_cli("deltaf_sweep") == 2);

    // Unknown key in the config file.
    const auto bad_cfg = work_dir / "bad.cfg";
    write_file(bad_cfg, "[scenario]\nn_t = 16\nmistyped_key = 1\n"
                        "[experiment]\ntrials = 0\n[sweep]\ntheta_grid = 0.0\n");
    CHECK(run_cli("deltaf_sweep --config '" + bad_cfg.string() + "' --out '" +
                  (work_dir / "bad.csv").string() + "'") == 2);

    // Config pins a different experiment.
    const auto pin_cfg = work_dir / "pin.cfg";
    write_file(pin_cfg, "[experiment]\nname = nmse_curve\ntrials = 0\n");
    CHECK(run_cli("deltaf_sweep --config '" + pin_cfg.string() + "'") == 2);

    // Missing config file is a usage problem too.
    CHECK(run_cli("deltaf_sweep --config '" +
                  (work_dir / "absent.cfg").string() + "'") == 2);

    // Runtime failure: unwritable output location.
    const auto ok_cfg = work_dir / "ok.cfg";
    write_file(ok_cfg, "[experiment]\ntrials = 0\n[scenario]\nn_t = 16\n"
                       "[sweep]\ntheta_grid = 0.0\n");
    CHECK(run_cli("deltaf_sweep --config '" + ok_cfg.string() +
                  "' --out '/nonexistent-dir/out.csv'") == 3);
}

static void test_cli_determinism()
{
    std::filesystem::create_directories(work_dir);
    const auto cfg_path = work_dir / "det.cfg";
    write_file(cfg_path, "[experiment]\ntrials = 400\n"
                         "[sweep]\nl_list = 3\nn_b_min = 9\nn_b_max = 9\n");
    const auto out_a = work_dir / "det_a.csv";
    const auto out_b = work_dir / "det_b.csv";
    const auto out_c = work_dir / "det_c.csv";

    CHECK(run_cli("iep_curve --config '" + cfg_path.string() + "' --seed 7 --out '" +
                  out_a.string() + "'") == 0);
    CHECK(run_cli("iep_curve --config '" + cfg_path.string() + "' --seed 7 --out '" +
                  out_b.string() + "'") == 0);
    CHECK(run_cli("iep_curve --config '" + cfg_path.string() + "' --seed 8 --out '" +
                  out_c.string() + "'") == 0);

    std::string a = read_file(out_a), b = read_file(out_b), c = read_file(out_c);
    CHECK(!a.empty());
    CHECK(a == b);
    CHECK(a != c);
}

static void test_cli_threads_invariance()
{
    // The worker count changes the schedule, never the result: bytes match
    // between a single-threaded run and an ICCSIM_THREADS-forced run.
    std::filesystem::create_directories(work_dir);
    const auto cfg_path = work_dir / "thr.cfg";
    write_file(cfg_path,
               "[experiment]\nseed = 4\ntrials = 30\n[scenario]\nn_t = 16\n"
               "[sweep]\ntheta_grid = -0.3, 0.3\n");
    const auto out_one = work_dir / "thr_one.csv";
    const auto out_env = work_dir / "thr_env.csv";

    CHECK(run_cli("deltaf_sweep --config '" + cfg_path.string() +
                  "' --threads 1 --out '" + out_one.string() + "'") == 0);
    const char *bin = std::getenv("ICCSIM_BIN");
    CHECK(bin != nullptr);
    std::string cmd = std::string("ICCSIM_THREADS=3 '") + (bin ? bin : "") +
                      "' deltaf_sweep --config '" + cfg_path.string() +
                      "' --out '" + out_env.string() + "' > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    CHECK(status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0);

    std::string one = read_file(out_one), env = read_file(out_env);
    CHECK(!one.empty());
    // The echoed thread count differs by design; every other byte matches.
    auto strip_threads = [](const std::string &text) {
        std::string out;
        for (const auto &line : split_lines(text))
            if (line.rfind("# threads", 0) != 0)
                out += line + "\n";
        return out;
    };
    CHECK(strip_threads(one) == strip_threads(env));
}

static void test_cli_emit_codebook()
{
    std::filesystem::create_directories(work_dir);
    const auto cfg_path = work_dir / "book.cfg";
    write_file(cfg_path, "[scenario]\nn_b = 8\ncode_order = 2\n");
    const auto book_path = work_dir / "book.txt";
    std::filesystem::remove(book_path);

    CHECK(run_cli("iep_curve --config '" + cfg_path.string() +
                  "' --emit-codebook '" + book_path.string() + "'") == 0);
    std::string text = read_file(book_path);
    std::vector<std::string> lines = split_lines(text);
    CHECK(lines.size() == 57); // header plus C(8, 5) = 56 words
    CHECK(lines[0] == "icc 8 2");
    for (std::size_t i = 1; i < lines.size(); i++)
    {
        CHECK(lines[i].size() == 8);
        int ones = 0;
        for (char ch : lines[i])
            ones += ch == '1';
        CHECK(ones == 5);
    }
}

int main()
{
    test_config_parsing();
    test_config_errors();
    test_config_serialize_round_trip();
    test_format_double();
    test_result_table_format();
    test_summarize_and_bounds();
    test_parallel_for();
    test_experiment_dispatch();
    test_stderr_scaling();
    test_library_determinism();
    test_cli_run_and_echo();
    test_cli_exit_codes();
    test_cli_determinism();
    test_cli_threads_invariance();
    test_cli_emit_codebook();
    return testsup::summary("test_harness_cli");
}
