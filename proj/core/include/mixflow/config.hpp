#pragma once

#include <map>
#include <string>
#include <vector>

#include "mixflow/solver.hpp"

namespace mixflow {

/// Flat dotted-key configuration: `# comments`, `key = value` lines.
class KeyValueConfig {
  public:
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_lines(const std::vector<std::string>& lines);

    /// Later assignments win; `grid.n=64` style strings.
    void apply_override(const std::string& assignment);

    bool has(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return entries_; }

    // typed getters; all record the key as consumed for unknown-key detection
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
    std::vector<std::string> get_strings(const std::string& key) const;

    /// Keys never consumed by a getter: typos are errors, not surprises.
    std::vector<std::string> unconsumed() const;

  private:
    std::map<std::string, std::string> entries_;
    mutable std::map<std::string, bool> consumed_;
};

/// Build a validated RunConfig. Unknown keys throw with the offending name.
RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});
RunConfig config_from_kv(const KeyValueConfig& kv);

/// Stokes probe settings live in the same file under probe.* keys.
StokesProbeConfig probe_config_from_kv(const KeyValueConfig& kv);

/// Resolved-config echo for the run manifest (deterministic key order).
std::map<std::string, std::string> config_echo(const RunConfig& config);

/// One documented configuration key; the table drives both unknown-key
/// validation and the generated reference page.
struct ConfigKeyDoc {
    const char* key;
    const char* default_value;
    const char* doc;
};
const std::vector<ConfigKeyDoc>& config_key_reference();

}  // namespace mixflow
