#include "fpsi/config.hpp"

#include <fstream>
#include <stdexcept>

namespace fpsi {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::string Config::get(const std::string& key, const std::string& def) const {
    auto it = kv.find(key);
    return it == kv.end() ? def : it->second;
}

double Config::get_double(const std::string& key, double def) const {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (trim(it->second.substr(pos)) != "")
        throw std::invalid_argument("bad numeric value for '" + key + "': " + it->second);
    return v;
}

int Config::get_int(const std::string& key, int def) const {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    size_t pos = 0;
    int v = std::stoi(it->second, &pos);
    if (trim(it->second.substr(pos)) != "")
        throw std::invalid_argument("bad integer value for '" + key + "': " + it->second);
    return v;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key=value, got '" + s + "'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        cfg.set(key, value);
    }
    return cfg;
}

void apply_assignment(Config& cfg, const std::string& assignment) {
    size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("expected key=value, got '" + assignment + "'");
    cfg.set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

}  // namespace fpsi
