#include "glvar/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace glvar {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                std::ostringstream os;
                os << origin << ":" << lineno << ": malformed section header '" << t << "'";
                throw ConfigError(os.str());
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << origin << ":" << lineno << ": expected 'key = value', got '" << t << "'";
            throw ConfigError(os.str());
        }
        Entry e;
        e.key = (section.empty() ? "" : section + ".") + trim(t.substr(0, eq));
        e.value = trim(t.substr(eq + 1));
        e.line = lineno;
        if (trim(t.substr(0, eq)).empty()) {
            std::ostringstream os;
            os << origin << ":" << lineno << ": empty key";
            throw ConfigError(os.str());
        }
        cfg.entries_.push_back(std::move(e));
    }
    return cfg;
}

const ConfigFile::Entry* ConfigFile::find(const std::string& key) const {
    for (const Entry& e : entries_) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

bool ConfigFile::has(const std::string& key) const { return find(key) != nullptr; }

std::string ConfigFile::get_string(const std::string& key,
                                   const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
}

std::string ConfigFile::require_string(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError(origin_ + ": missing required key '" + key + "'");
    return e->value;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    char* end = nullptr;
    const double v = std::strtod(e->value.c_str(), &end);
    if (end == e->value.c_str() || *end != '\0') {
        std::ostringstream os;
        os << origin_ << ":" << e->line << ": field '" << key << "' is not a number: '"
           << e->value << "'";
        throw ConfigError(os.str());
    }
    return v;
}

double ConfigFile::require_double(const std::string& key) const {
    if (!has(key)) throw ConfigError(origin_ + ": missing required key '" + key + "'");
    return get_double(key, 0.0);
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw ConfigError(origin_ + ": field '" + key + "' must be an integer");
    }
    return i;
}

std::uint64_t ConfigFile::get_u64(const std::string& key, std::uint64_t fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    char* end = nullptr;
    const std::uint64_t v = std::strtoull(e->value.c_str(), &end, 10);
    if (end == e->value.c_str() || *end != '\0') {
        std::ostringstream os;
        os << origin_ << ":" << e->line << ": field '" << key
           << "' is not an unsigned integer: '" << e->value << "'";
        throw ConfigError(os.str());
    }
    return v;
}

std::vector<double> ConfigFile::get_list(const std::string& key,
                                         const std::vector<double>& fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::vector<double> out;
    std::stringstream ss(e->value);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const std::string t = trim(cell);
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0') {
            std::ostringstream os;
            os << origin_ << ":" << e->line << ": list field '" << key
               << "' has a bad entry '" << t << "'";
            throw ConfigError(os.str());
        }
        out.push_back(v);
    }
    if (out.empty()) {
        std::ostringstream os;
        os << origin_ << ":" << e->line << ": list field '" << key << "' is empty";
        throw ConfigError(os.str());
    }
    return out;
}

std::string ConfigFile::flat() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        if (k) os << "; ";
        os << entries_[k].key << "=" << entries_[k].value;
    }
    return os.str();
}

}  // namespace glvar
