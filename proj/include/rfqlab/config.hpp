#pragma once

// Flat key/value config files with [sections]; '#' and ';' start comments.
// Typed getters throw InvalidConfig with the offending key.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rfqlab/errors.hpp"

namespace rfq {

class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double def) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t def) const;
    bool get_bool(const std::string& key, bool def) const;
    std::vector<double> get_doubles(const std::string& key) const; // comma separated
    std::vector<double> get_doubles(const std::string& key, std::vector<double> def) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_; // "section.key" -> raw text
};

} // namespace rfq
