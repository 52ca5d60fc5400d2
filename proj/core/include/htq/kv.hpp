#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace htq {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key/value document. Accepts the TOML subset `key = value` with dotted
// keys, `[table]` headers (prefixing subsequent keys), `#` comments, quoted
// strings, numbers, booleans and one-line numeric arrays.
class KvDoc {
 public:
  KvDoc() = default;

  static KvDoc parse(const std::string& text);
  static KvDoc load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  // `key=value` override as given on the command line
  void set_assignment(const std::string& assignment);

  const std::string& str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> nums(const std::string& key) const;

  // all entries below `prefix.` with the prefix stripped
  KvDoc sub(const std::string& prefix) const;
  void merge(const KvDoc& other, const std::string& prefix = "");

  const std::map<std::string, std::string>& entries() const { return values_; }
  std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
};

std::string format_double(double v);

}  // namespace htq
