#include "htq/kv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace htq {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

double parse_number(const std::string& key, const std::string& raw) {
  std::string v = trim(raw);
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected a number, got '" + raw + "'");
  return out;
}

}  // namespace

KvDoc KvDoc::parse(const std::string& text) {
  KvDoc doc;
  std::istringstream in(text);
  std::string line, table;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad table header");
      table = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = unquote(trim(line.substr(0, eq)));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!table.empty()) key = table + "." + key;
    doc.values_[key] = unquote(val);
  }
  return doc;
}

KvDoc KvDoc::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void KvDoc::set_assignment(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  values_[trim(assignment.substr(0, eq))] = unquote(trim(assignment.substr(eq + 1)));
}

const std::string& KvDoc::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string KvDoc::str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KvDoc::num(const std::string& key) const { return parse_number(key, str(key)); }

double KvDoc::num(const std::string& key, double fallback) const {
  return has(key) ? num(key) : fallback;
}

long long KvDoc::integer(const std::string& key) const {
  double v = num(key);
  if (v != static_cast<double>(static_cast<long long>(v)))
    throw ConfigError("key '" + key + "': expected an integer");
  return static_cast<long long>(v);
}

long long KvDoc::integer(const std::string& key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool KvDoc::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = str(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key '" + key + "': expected true/false");
}

std::vector<double> KvDoc::nums(const std::string& key) const {
  std::string v = trim(str(key));
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number(key, item));
  }
  return out;
}

KvDoc KvDoc::sub(const std::string& prefix) const {
  KvDoc out;
  std::string p = prefix + ".";
  for (auto it = values_.lower_bound(p); it != values_.end() && it->first.compare(0, p.size(), p) == 0; ++it)
    out.values_[it->first.substr(p.size())] = it->second;
  return out;
}

void KvDoc::merge(const KvDoc& other, const std::string& prefix) {
  for (const auto& [k, v] : other.values_) values_[prefix.empty() ? k : prefix + "." + k] = v;
}

std::string KvDoc::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    bool numeric = true;
    double tmp;
    auto r = std::from_chars(v.data(), v.data() + v.size(), tmp);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) numeric = false;
    bool literal = numeric || v == "true" || v == "false" || (!v.empty() && v.front() == '[');
    out += k + " = " + (literal ? v : "\"" + v + "\"") + "\n";
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace htq
