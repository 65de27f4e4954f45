#include "balltrack/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "balltrack/error.hpp"

namespace balltrack {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& name) {
    Config config;
    config.name_ = name;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string trimmed = trim(line);
        if (trimmed.empty()) {
            continue;
        }
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw FormatError(name + ":" + std::to_string(line_no) +
                              ": expected `key = value`, got \"" + trimmed + "\"");
        }
        const std::string key = trim(trimmed.substr(0, eq));
        const std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty()) {
            throw FormatError(name + ":" + std::to_string(line_no) + ": empty key");
        }
        config.entries_[key] = value;
    }
    return config;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path.string());
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

double Config::get_double(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw FormatError(name_ + ": missing required key \"" + key + "\"");
    }
    try {
        std::size_t used = 0;
        const double value = std::stod(it->second, &used);
        if (used != it->second.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return value;
    } catch (const std::exception&) {
        throw FormatError(name_ + ": value of \"" + key + "\" is not a number: \"" + it->second +
                          "\"");
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
    const double value = get_double(key);
    const int as_int = static_cast<int>(value);
    if (static_cast<double>(as_int) != value) {
        throw FormatError(name_ + ": value of \"" + key + "\" is not an integer");
    }
    return as_int;
}

int Config::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_uint64(const std::string& key, std::uint64_t fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        return fallback;
    }
    try {
        std::size_t used = 0;
        const std::uint64_t value = std::stoull(it->second, &used);
        if (used != it->second.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return value;
    } catch (const std::exception&) {
        throw FormatError(name_ + ": value of \"" + key + "\" is not an unsigned integer: \"" +
                          it->second + "\"");
    }
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

}  // namespace balltrack
