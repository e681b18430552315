#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glvar/errors.hpp"

namespace glvar {

inline constexpr const char* kToolVersion = "glvar 1.0.0";

/// Plain-text configuration: `key = value` lines under `[section]` headers,
/// `#` comments. Lookups are by "section.key". Parse errors carry line
/// numbers.
class ConfigFile {
public:
    ConfigFile() = default;

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    double require_double(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;

    /// Single-line rendering of every entry, for provenance comments.
    std::string flat() const;

private:
    struct Entry {
        std::string key;  // section.key
        std::string value;
        int line = 0;
    };
    std::vector<Entry> entries_;
    std::string origin_ = "<none>";

    const Entry* find(const std::string& key) const;
};

}  // namespace glvar
