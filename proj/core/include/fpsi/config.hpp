#ifndef FPSI_CONFIG_HPP
#define FPSI_CONFIG_HPP

#include <map>
#include <string>

namespace fpsi {

/// Flat key=value configuration. Lines starting with '#' and blank lines are
/// ignored; values keep everything after the first '='.
struct Config {
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv[key] = value; }

    std::string get(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
};

Config load_config(const std::string& path);

/// Parse a command-line override of the form key=value into cfg.
void apply_assignment(Config& cfg, const std::string& assignment);

}  // namespace fpsi

#endif
