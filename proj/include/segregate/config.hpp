#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace seg {

// Raised on malformed config files, unknown keys or invalid values; the CLI
// maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key=value configuration with dotted namespaces ('#' starts a comment).
// Every key that is read (or defaulted) lands in `resolved`, which the
// runners echo into their JSON outputs. Keys never read are rejected by
// reject_unknown().
class Config {
  public:
    Config() = default;
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const;

    double get_double(const std::string& key);
    double get_double(const std::string& key, double fallback);
    int get_int(const std::string& key);
    int get_int(const std::string& key, int fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::string get_string(const std::string& key);
    std::string get_string(const std::string& key, const std::string& fallback);
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback);
    // raw comma-separated tokens, preserved verbatim (used in file names)
    std::vector<std::string> get_tokens(const std::string& key,
                                        const std::vector<std::string>& fallback);

    void reject_unknown() const;
    const std::map<std::string, std::string>& resolved() const { return resolved_; }

  private:
    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> consumed_;
    std::map<std::string, std::string> resolved_;
};

} // namespace seg
