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

#ifndef iccsim_csv_H
#define iccsim_csv_H

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace iccsim
{
    // Sweep results as CSV: "#"-prefixed metadata lines (the config echo),
    // one header row, then data rows. UTF-8, LF newlines, floats as shortest
    // round-trip decimals, so identical inputs give identical bytes.
    class result_table
    {
    public:
        using cell = std::variant<std::string, std::int64_t, double>;

        void add_metadata(const std::string &line);     // stored without the "# "
        void set_columns(std::vector<std::string> cols);
        void add_row(std::vector<cell> cells);

        std::string to_csv() const;
        void write_file(const std::string &path) const;

        const std::vector<std::string> &metadata() const { return metadata_; }
        const std::vector<std::string> &columns() const { return columns_; }
        const std::vector<std::vector<cell>> &rows() const { return rows_; }

    private:
        std::vector<std::string> metadata_;
        std::vector<std::string> columns_;
        std::vector<std::vector<cell>> rows_;
    };
}

#endif
