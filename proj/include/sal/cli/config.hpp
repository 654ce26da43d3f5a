#pragma once

// Line-oriented "key = value" configuration with [section] headers.
// Parsing is strict: unknown sections or keys are errors, so a misspelled
// key can never silently fall back to a default. Environment variables
// SAL_<SECTION>_<KEY> (uppercased, '-' as '_') override file values.

#include "sal/common.hpp"
#include "sal/util/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace sal::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

inline std::string env_name(const std::string& section, const std::string& key) {
    std::string out = "SAL_" + section + "_" + key;
    for (char& c : out) {
        if (c == '-' || c == '.') c = '_';
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

}  // namespace detail

class IniConfig {
public:
    IniConfig() = default;

    static IniConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in.good()) throw ConfigError("cannot read config file: " + path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        return parse_text(buffer.str(), path);
    }

    static IniConfig parse_text(const std::string& text, const std::string& origin = "<text>") {
        IniConfig cfg;
        std::istringstream in(text);
        std::string line, section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string t = detail::trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']') {
                    throw ConfigError(origin + ":" + std::to_string(line_no) +
                                      ": malformed section header");
                }
                section = detail::trim(t.substr(1, t.size() - 2));
                if (section.empty()) {
                    throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section");
                }
                cfg.values_[section];  // section may be empty but must exist
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": expected key = value");
            }
            if (section.empty()) {
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": key outside any [section]");
            }
            const std::string key = detail::trim(t.substr(0, eq));
            const std::string value = detail::trim(t.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
            }
            if (cfg.values_[section].count(key)) {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                                  key + "' in [" + section + "]");
            }
            cfg.values_[section][key] = value;
        }
        return cfg;
    }

    // every present section/key must appear in the schema
    void validate_schema(const std::map<std::string, std::set<std::string>>& schema) const {
        for (const auto& [section, keys] : values_) {
            const auto it = schema.find(section);
            if (it == schema.end()) throw ConfigError("unknown config section [" + section + "]");
            for (const auto& [key, value] : keys) {
                if (!it->second.count(key)) {
                    throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
                }
            }
        }
    }

    void apply_env_overrides(const std::map<std::string, std::set<std::string>>& schema) {
        for (const auto& [section, keys] : schema) {
            for (const auto& key : keys) {
                if (const char* v = std::getenv(detail::env_name(section, key).c_str())) {
                    values_[section][key] = v;
                }
            }
        }
    }

    bool has(const std::string& section, const std::string& key) const {
        const auto s = values_.find(section);
        return s != values_.end() && s->second.count(key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        const auto s = values_.find(section);
        if (s == values_.end()) return fallback;
        const auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        if (!has(section, key)) return fallback;
        const std::string raw = values_.at(section).at(key);
        try {
            std::size_t used = 0;
            const double v = std::stod(raw, &used);
            if (used != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' in [" + section + "] is not a number: " + raw);
        }
    }

    long get_int(const std::string& section, const std::string& key, long fallback) const {
        if (!has(section, key)) return fallback;
        const std::string raw = values_.at(section).at(key);
        try {
            std::size_t used = 0;
            const long v = std::stol(raw, &used);
            if (used != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' in [" + section + "] is not an integer: " + raw);
        }
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        if (!has(section, key)) return fallback;
        const std::string raw = values_.at(section).at(key);
        if (raw == "true" || raw == "1" || raw == "on") return true;
        if (raw == "false" || raw == "0" || raw == "off") return false;
        throw ConfigError("key '" + key + "' in [" + section + "] is not a boolean: " + raw);
    }

    std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
        if (!has(section, key)) return fallback;
        const std::string raw = values_.at(section).at(key);
        std::vector<double> out;
        std::istringstream in(raw);
        std::string item;
        while (std::getline(in, item, ',')) {
            const std::string t = detail::trim(item);
            if (t.empty()) continue;
            try {
                out.push_back(std::stod(t));
            } catch (const std::exception&) {
                throw ConfigError("key '" + key + "' in [" + section +
                                  "] has a non-numeric list item: " + t);
            }
        }
        if (out.empty()) throw ConfigError("key '" + key + "' in [" + section + "] is empty");
        return out;
    }

    void set(const std::string& section, const std::string& key, const std::string& value) {
        values_[section][key] = value;
    }

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return values_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
};

// Resolved configuration echoed into reports: sections and keys sorted, so
// serialization is deterministic and feeding the echo back reproduces the
// run.
class ConfigEcho {
public:
    void put(const std::string& section, const std::string& key, const std::string& value) {
        values_[section][key] = value;
    }
    void put(const std::string& section, const std::string& key, double value) {
        put(section, key, format_double(value));
    }
    void put(const std::string& section, const std::string& key, long value) {
        put(section, key, std::to_string(value));
    }
    void put(const std::string& section, const std::string& key, int value) {
        put(section, key, std::to_string(value));
    }
    void put(const std::string& section, const std::string& key, bool value) {
        put(section, key, value ? std::string("true") : std::string("false"));
    }
    void put(const std::string& section, const std::string& key, const std::vector<double>& v) {
        std::string joined;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) joined += ",";
            joined += format_double(v[i]);
        }
        put(section, key, joined);
    }

    std::string to_ini() const {
        std::string out;
        for (const auto& [section, keys] : values_) {
            out += "[" + section + "]\n";
            for (const auto& [key, value] : keys) out += key + " = " + value + "\n";
            out += "\n";
        }
        return out;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace sal::cli
