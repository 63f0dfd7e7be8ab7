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

#ifndef iccsim_config_H
#define iccsim_config_H

#include <cstdint>
#include <string>
#include <vector>

namespace iccsim
{
    // Line-oriented "key = value" text with [section] headers and # comments.
    // Entries keep file order so a parsed config can be echoed byte-stably.
    // Typed getters mark keys consumed; unconsumed keys are reported as
    // errors so misspellings never pass silently.
    class config
    {
    public:
        struct entry
        {
            std::string section, key, value;
            bool consumed = false;
        };

        static config parse_text(const std::string &text);
        static config parse_file(const std::string &path);

        bool has(const std::string &section, const std::string &key) const;

        std::string get_string(const std::string &section, const std::string &key,
                               const std::string &fallback);
        std::string require_string(const std::string &section, const std::string &key);
        double get_double(const std::string &section, const std::string &key,
                          double fallback);
        std::int64_t get_int(const std::string &section, const std::string &key,
                             std::int64_t fallback);
        std::uint64_t get_uint(const std::string &section, const std::string &key,
                               std::uint64_t fallback);
        bool get_bool(const std::string &section, const std::string &key,
                      bool fallback);
        std::vector<double> get_double_list(const std::string &section,
                                            const std::string &key,
                                            const std::vector<double> &fallback);
        std::vector<std::int64_t> get_int_list(const std::string &section,
                                               const std::string &key,
                                               const std::vector<std::int64_t> &fallback);

        // Replaces or appends an entry (used by CLI overrides); the entry is
        // marked consumed.
        void set(const std::string &section, const std::string &key,
                 const std::string &value);

        // Throws config_error naming every key no getter asked for.
        void ensure_all_consumed() const;

        // Canonical serialization: [section] headers in first-appearance
        // order, "key = value" lines in entry order.
        std::string serialize() const;

        const std::vector<entry> &entries() const { return entries_; }

    private:
        entry *find(const std::string &section, const std::string &key);
        std::vector<entry> entries_;
    };

    // Shortest round-trip decimal for a double (to_chars), "0" for zero.
    std::string format_double(double v);
}

#endif
