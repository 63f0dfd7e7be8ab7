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

#ifndef iccsim_common_H
#define iccsim_common_H

#include <armadillo>
#include <complex>
#include <stdexcept>
#include <string>

namespace iccsim
{
    inline constexpr const char *version_string = "0.1.0";

    inline constexpr double pi = 3.141592653589793238462643383279502884;

    // Wraps an angle difference into (-pi, pi].
    inline double wrap_angle(double a)
    {
        double x = std::fmod(a + pi, 2.0 * pi);
        if (x <= 0.0)
            x += 2.0 * pi;
        return x - pi;
    }

    // Configuration problems that map to CLI exit code 2.
    class config_error : public std::runtime_error
    {
    public:
        explicit config_error(const std::string &msg) : std::runtime_error(msg) {}
    };
}

#endif
