#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace balltrack {

// UTF-8 `key = value` file: one pair per line, '#' starts a comment, blank
// lines ignored. Later duplicates win.
class Config {
public:
    Config() = default;
    static Config load(const std::filesystem::path& path);
    static Config parse(const std::string& text, const std::string& name = "<string>");

    bool has(const std::string& key) const;

    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::string name_ = "<empty>";
    std::map<std::string, std::string> entries_;
};

}  // namespace balltrack
