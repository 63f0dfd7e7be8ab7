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

#include "iccsim/csv.hpp"

#include <fstream>
#include <stdexcept>

#include "iccsim/config.hpp"

namespace iccsim
{
    void result_table::add_metadata(const std::string &line)
    {
        metadata_.push_back(line);
    }

    void result_table::set_columns(std::vector<std::string> cols)
    {
        columns_ = std::move(cols);
    }

    void result_table::add_row(std::vector<cell> cells)
    {
        if (cells.size() != columns_.size())
            throw std::logic_error("result_table: row width does not match the header");
        rows_.push_back(std::move(cells));
    }

    std::string result_table::to_csv() const
    {
        std::string out;
        for (const auto &m : metadata_)
            out += "# " + m + "\n";
        for (std::size_t i = 0; i < columns_.size(); i++)
        {
            if (i)
                out += ",";
            out += columns_[i];
        }
        out += "\n";
        for (const auto &row : rows_)
        {
            for (std::size_t i = 0; i < row.size(); i++)
            {
                if (i)
                    out += ",";
                if (const auto *s = std::get_if<std::string>(&row[i]))
                    out += *s;
                else if (const auto *n = std::get_if<std::int64_t>(&row[i]))
                    out += std::to_string(*n);
                else
                    out += format_double(std::get<double>(row[i]));
            }
            out += "\n";
        }
        return out;
    }

    void result_table::write_file(const std::string &path) const
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw std::runtime_error("result_table: cannot open " + path);
        std::string text = to_csv();
        os.write(text.data(), std::streamsize(text.size()));
        if (!os)
            throw std::runtime_error("result_table: write failure on " + path);
    }
}
