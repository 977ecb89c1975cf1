#pragma once

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wvcp {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat `key = value` text with `#` comments. Every read is tracked so that
// finalize() can reject misspelled keys.
class Config {
public:
    static Config parse(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(trimmed.substr(0, eq));
            std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        used_.insert(key);
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    long long get_int(const std::string& key, long long fallback) const {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return parse_int(key, it->second);
    }

    double get_double(const std::string& key, double fallback) const {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ConfigError("key " + key + ": not a number: " + it->second);
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ConfigError("key " + key + ": expected true/false: " + it->second);
    }

    std::vector<std::string> get_list(const std::string& key) const {
        used_.insert(key);
        std::vector<std::string> out;
        auto it = values_.find(key);
        if (it == values_.end()) return out;
        std::istringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    // keys matching `prefix.<suffix>`, e.g. per-instance target scores
    std::map<std::string, std::string> get_prefixed(const std::string& prefix) const {
        std::map<std::string, std::string> out;
        for (const auto& [k, v] : values_) {
            if (k.size() > prefix.size() + 1 && k.compare(0, prefix.size(), prefix) == 0 &&
                k[prefix.size()] == '.') {
                used_.insert(k);
                out[k.substr(prefix.size() + 1)] = v;
            }
        }
        return out;
    }

    void finalize() const {
        std::string unknown;
        for (const auto& [k, v] : values_)
            if (!used_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
        if (!unknown.empty()) throw ConfigError("unknown config keys: " + unknown);
    }

    static long long parse_int(const std::string& key, const std::string& value) {
        try {
            std::size_t pos;
            long long v = std::stoll(value, &pos);
            if (pos != value.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ConfigError("key " + key + ": not an integer: " + value);
        }
    }

private:
    static std::string trim(const std::string& s) {
        std::size_t b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return "";
        std::size_t e = s.find_last_not_of(" \t");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

}  // namespace wvcp
