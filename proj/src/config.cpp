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

#include "iccsim/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "iccsim/common.hpp"

namespace iccsim
{
    namespace
    {
        std::string trim(const std::string &s)
        {
            std::size_t a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos)
                return "";
            std::size_t b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        }

        std::vector<std::string> split_list(const std::string &value)
        {
            std::vector<std::string> out;
            std::string item;
            std::istringstream is(value);
            while (std::getline(is, item, ','))
            {
                item = trim(item);
                if (!item.empty())
                    out.push_back(item);
            }
            return out;
        }

        double parse_double(const std::string &where, const std::string &s)
        {
            char *end = nullptr;
            double v = std::strtod(s.c_str(), &end);
            if (end == s.c_str() || *end != '\0')
                throw config_error(where + ": not a number: '" + s + "'");
            return v;
        }

        std::int64_t parse_int(const std::string &where, const std::string &s)
        {
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size())
                throw config_error(where + ": not an integer: '" + s + "'");
            return v;
        }
    }

    std::string format_double(double v)
    {
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        if (ec != std::errc())
            return "0";
        return std::string(buf, p);
    }

    config config::parse_text(const std::string &text)
    {
        config out;
        std::string section;
        std::istringstream is(text);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(is, line))
        {
            line_no++;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#')
                continue;
            if (t.front() == '[')
            {
                if (t.back() != ']' || t.size() < 3)
                    throw config_error("config line " + std::to_string(line_no) +
                                       ": malformed section header");
                section = trim(t.substr(1, t.size() - 2));
                continue;
            }
            std::size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(line_no) +
                                   ": expected key = value");
            entry e;
            e.section = section;
            e.key = trim(t.substr(0, eq));
            e.value = trim(t.substr(eq + 1));
            if (e.key.empty())
                throw config_error("config line " + std::to_string(line_no) +
                                   ": empty key");
            for (const auto &prev : out.entries_)
                if (prev.section == e.section && prev.key == e.key)
                    throw config_error("config: duplicate key [" + e.section + "] " +
                                       e.key);
            out.entries_.push_back(std::move(e));
        }
        return out;
    }

    config config::parse_file(const std::string &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw config_error("config: cannot open " + path);
        std::ostringstream buf;
        buf << is.rdbuf();
        return parse_text(buf.str());
    }

    config::entry *config::find(const std::string &section, const std::string &key)
    {
        for (auto &e : entries_)
            if (e.section == section && e.key == key)
                return &e;
        return nullptr;
    }

    bool config::has(const std::string &section, const std::string &key) const
    {
        for (const auto &e : entries_)
            if (e.section == section && e.key == key)
                return true;
        return false;
    }

    std::string config::get_string(const std::string &section, const std::string &key,
                                   const std::string &fallback)
    {
        entry *e = find(section, key);
        if (!e)
            return fallback;
        e->consumed = true;
        return e->value;
    }

    std::string config::require_string(const std::string &section, const std::string &key)
    {
        entry *e = find(section, key);
        if (!e)
            throw config_error("config: missing required key [" + section + "] " + key);
        e->consumed = true;
        return e->value;
    }

    double config::get_double(const std::string &section, const std::string &key,
                              double fallback)
    {
        entry *e = find(section, key);
        if (!e)
            return fallback;
        e->consumed = true;
        return parse_double("[" + section + "] " + key, e->value);
    }

    std::int64_t config::get_int(const std::string &section, const std::string &key,
                                 std::int64_t fallback)
    {
        entry *e = find(section, key);
        if (!e)
            return fallback;
        e->consumed = true;
        return parse_int("[" + section + "] " + key, e->value);
    }

    std::uint64_t config::get_uint(const std::string &section, const std::string &key,
                                   std::uint64_t fallback)
    {
        entry *e = find(section, key);
        if (!e)
            return fallback;
        e->consumed = true;
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(e->value.data(),
                                       e->value.data() + e->value.size(), v);
        if (ec != std::errc() || p != e->value.data() + e->value.size())
            throw config_error("[" + section + "] " + key +
                               ": not an unsigned integer: '" + e->value + "'");
        return v;
    }

    bool config::get_bool(const std::string &section, const std::string &key,
                          bool fallback)
    {
        entry *e = find(section, key);
        if (!e)
            return fallback;
        e->consumed = true;
        if (e->value == "true" || e->value == "1" || e->value == "yes")
            return true;
        if (e->value == "false" || e->value == "0" || e->value == "no")
            return false;
        throw config_error("[" + section + "] " + key + ": not a boolean: '" +
                           e->value + "'");
    }

    std::vector<double> config::get_double_list(const std::string &section,
                                                const std::string &key,
                                                const std::vector<double> &fallback)
    {
        entry *e = find(section, key);
        if (!e)
            return fallback;
        e->consumed = true;
        std::vector<double> out;
        for (const auto &item : split_list(e->value))
            out.push_back(parse_double("[" + section + "] " + key, item));
        if (out.empty())
            throw config_error("[" + section + "] " + key + ": empty list");
        return out;
    }

    std::vector<std::int64_t> config::get_int_list(const std::string &section,
                                                   const std::string &key,
                                                   const std::vector<std::int64_t> &fallback)
    {
        entry *e = find(section, key);
        if (!e)
            return fallback;
        e->consumed = true;
        std::vector<std::int64_t> out;
        for (const auto &item : split_list(e->value))
            out.push_back(parse_int("[" + section + "] " + key, item));
        if (out.empty())
            throw config_error("[" + section + "] " + key + ": empty list");
        return out;
    }

    void config::set(const std::string &section, const std::string &key,
                     const std::string &value)
    {
        if (entry *e = find(section, key))
        {
            e->value = value;
            e->consumed = true;
            return;
        }
        entry e;
        e.section = section;
        e.key = key;
        e.value = value;
        e.consumed = true;
        entries_.push_back(std::move(e));
    }

    void config::ensure_all_consumed() const
    {
        std::string leftovers;
        for (const auto &e : entries_)
            if (!e.consumed)
                leftovers += (leftovers.empty() ? "" : ", ") + std::string("[") +
                             e.section + "] " + e.key;
        if (!leftovers.empty())
            throw config_error("config: unknown keys: " + leftovers);
    }

    std::string config::serialize() const
    {
        // Sections in first-appearance order; entries keep insertion order
        // within their section.
        std::vector<std::string> sections;
        for (const auto &e : entries_)
        {
            bool seen = false;
            for (const auto &s : sections)
                if (s == e.section)
                    seen = true;
            if (!seen)
                sections.push_back(e.section);
        }
        std::string out;
        for (const auto &s : sections)
        {
            if (!s.empty())
                out += "[" + s + "]\n";
            for (const auto &e : entries_)
                if (e.section == s)
                    out += e.key + " = " + e.value + "\n";
        }
        return out;
    }
}
