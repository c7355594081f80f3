#include "segregate/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace seg {

namespace {
std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace

Config Config::parse_string(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (c.kv_.count(key))
            throw ConfigError("config: duplicate key '" + key + "'");
        c.kv_[key] = val;
    }
    return c;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

bool Config::has(const std::string& key) const {
    return kv_.count(key) > 0;
}

double Config::get_double(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("config: missing required key '" + key + "'");
    consumed_.insert(key);
    try {
        size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        resolved_[key] = fmt_double(v);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not a number: '" + it->second + "'");
    }
}

double Config::get_double(const std::string& key, double fallback) {
    if (!kv_.count(key)) {
        resolved_[key] = fmt_double(fallback);
        return fallback;
    }
    return get_double(key);
}

int Config::get_int(const std::string& key) {
    double v = get_double(key);
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("config: key '" + key + "' is not an integer");
    resolved_[key] = std::to_string(i);
    return i;
}

int Config::get_int(const std::string& key, int fallback) {
    if (!kv_.count(key)) {
        resolved_[key] = std::to_string(fallback);
        return fallback;
    }
    return get_int(key);
}

bool Config::get_bool(const std::string& key, bool fallback) {
    if (!kv_.count(key)) {
        resolved_[key] = fallback ? "true" : "false";
        return fallback;
    }
    consumed_.insert(key);
    const std::string& v = kv_.at(key);
    if (v == "true" || v == "1") {
        resolved_[key] = "true";
        return true;
    }
    if (v == "false" || v == "0") {
        resolved_[key] = "false";
        return false;
    }
    throw ConfigError("config: key '" + key + "' is not a boolean: '" + v + "'");
}

std::string Config::get_string(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("config: missing required key '" + key + "'");
    consumed_.insert(key);
    resolved_[key] = it->second;
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
    if (!kv_.count(key)) {
        resolved_[key] = fallback;
        return fallback;
    }
    return get_string(key);
}

std::vector<std::string> Config::get_tokens(const std::string& key,
                                            const std::vector<std::string>& fallback) {
    std::vector<std::string> out;
    if (!kv_.count(key)) {
        out = fallback;
    } else {
        consumed_.insert(key);
        std::istringstream ss(kv_.at(key));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (!tok.empty()) out.push_back(tok);
        }
        if (out.empty()) throw ConfigError("config: key '" + key + "' has no values");
    }
    std::string echo;
    for (size_t i = 0; i < out.size(); ++i) echo += (i ? "," : "") + out[i];
    resolved_[key] = echo;
    return out;
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::vector<double>& fallback) {
    std::vector<std::string> fb;
    for (double v : fallback) fb.push_back(fmt_double(v));
    auto toks = get_tokens(key, fb);
    std::vector<double> out;
    for (const auto& t : toks) {
        try {
            size_t pos = 0;
            out.push_back(std::stod(t, &pos));
            if (pos != t.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' has a non-numeric entry '" + t + "'");
        }
    }
    return out;
}

void Config::reject_unknown() const {
    for (const auto& [k, v] : kv_) {
        if (!consumed_.count(k))
            throw ConfigError("config: unknown key '" + k + "'");
    }
}

} // namespace seg
