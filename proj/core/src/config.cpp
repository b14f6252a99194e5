#include "chmhd/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace chmhd {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream f(path);
    CHMHD_REQUIRE(f.good(), "cannot open config file '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return from_text(os.str(), path);
}

Config Config::from_text(const std::string& text, const std::string& origin) {
    Config c;
    c.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            CHMHD_REQUIRE(s.back() == ']',
                          origin + ":" + std::to_string(lineno) + ": unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            CHMHD_REQUIRE(valid_name(section),
                          origin + ":" + std::to_string(lineno) + ": bad section name '" +
                              section + "'");
            continue;
        }
        const size_t eq = s.find('=');
        CHMHD_REQUIRE(eq != std::string::npos,
                      origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        CHMHD_REQUIRE(valid_name(key),
                      origin + ":" + std::to_string(lineno) + ": bad key name '" + key + "'");
        CHMHD_REQUIRE(!section.empty(),
                      origin + ":" + std::to_string(lineno) + ": key '" + key +
                          "' appears before any [section]");
        const std::string dotted = section + "." + key;
        CHMHD_REQUIRE(!c.entries_.count(dotted), origin + ":" + std::to_string(lineno) +
                                                     ": duplicate key '" + dotted + "'");
        c.entries_[dotted] = Entry{value, lineno, false};
    }
    return c;
}

void Config::apply_override(const std::string& spec) {
    const size_t eq = spec.find('=');
    CHMHD_REQUIRE(eq != std::string::npos,
                  "override '" + spec + "' is not of the form section.key=value");
    const std::string dotted = trim(spec.substr(0, eq));
    const size_t dot = dotted.find('.');
    CHMHD_REQUIRE(dot != std::string::npos && valid_name(dotted.substr(0, dot)) &&
                      valid_name(dotted.substr(dot + 1)),
                  "override '" + spec + "' is not of the form section.key=value");
    entries_[dotted] = Entry{trim(spec.substr(eq + 1)), 0, false};
}

bool Config::has(const std::string& dotted) const { return entries_.count(dotted) > 0; }

const std::string* Config::lookup(const std::string& dotted) {
    auto it = entries_.find(dotted);
    if (it == entries_.end()) return nullptr;
    it->second.consumed = true;
    return &it->second.value;
}

void Config::fail(const std::string& dotted, const std::string& why) const {
    auto it = entries_.find(dotted);
    std::string at = origin_;
    if (it != entries_.end() && it->second.line > 0) at += ":" + std::to_string(it->second.line);
    throw Error(at + ": " + why + " for '" + dotted + "'");
}

double Config::require_double(const std::string& dotted) {
    const std::string* v = lookup(dotted);
    if (!v) fail(dotted, "missing required value");
    char* end = nullptr;
    const double d = std::strtod(v->c_str(), &end);
    if (end != v->c_str() + v->size() || v->empty()) fail(dotted, "expected a number, got '" + *v + "'");
    return d;
}

std::string Config::require_string(const std::string& dotted) {
    const std::string* v = lookup(dotted);
    if (!v) fail(dotted, "missing required value");
    return *v;
}

double Config::get_double(const std::string& dotted, double fallback) {
    return has(dotted) ? require_double(dotted) : fallback;
}

int Config::get_int(const std::string& dotted, int fallback) {
    if (!has(dotted)) return fallback;
    const std::string* v = lookup(dotted);
    char* end = nullptr;
    const long n = std::strtol(v->c_str(), &end, 10);
    if (end != v->c_str() + v->size() || v->empty()) fail(dotted, "expected an integer, got '" + *v + "'");
    return int(n);
}

std::uint64_t Config::get_u64(const std::string& dotted, std::uint64_t fallback) {
    if (!has(dotted)) return fallback;
    const std::string* v = lookup(dotted);
    char* end = nullptr;
    const unsigned long long n = std::strtoull(v->c_str(), &end, 10);
    if (end != v->c_str() + v->size() || v->empty()) fail(dotted, "expected an integer, got '" + *v + "'");
    return std::uint64_t(n);
}

bool Config::get_bool(const std::string& dotted, bool fallback) {
    if (!has(dotted)) return fallback;
    const std::string v = *lookup(dotted);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(dotted, "expected a boolean, got '" + v + "'");
}

std::string Config::get_string(const std::string& dotted, const std::string& fallback) {
    return has(dotted) ? *lookup(dotted) : fallback;
}

void Config::reject_unknown() const {
    std::string bad;
    for (const auto& [key, entry] : entries_)
        if (!entry.consumed) bad += (bad.empty() ? "" : ", ") + key;
    if (!bad.empty()) throw Error(origin_ + ": unknown configuration keys: " + bad);
}

}  // namespace chmhd
