// Strict INI configuration. Files have [section] headers and key = value
// lines; lookups use dotted keys ("time.dt"). Every read marks its key
// consumed, and reject_unknown() reports anything left over, so misspelled
// keys in files or --override specs fail loudly instead of being ignored.
#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "chmhd/util.hpp"

namespace chmhd {

class Config {
  public:
    static Config from_file(const std::string& path);
    static Config from_text(const std::string& text, const std::string& origin = "<inline>");

    // "section.key=value": replaces or adds the entry.
    void apply_override(const std::string& spec);

    bool has(const std::string& dotted) const;

    double require_double(const std::string& dotted);
    std::string require_string(const std::string& dotted);
    double get_double(const std::string& dotted, double fallback);
    int get_int(const std::string& dotted, int fallback);
    std::uint64_t get_u64(const std::string& dotted, std::uint64_t fallback);
    bool get_bool(const std::string& dotted, bool fallback);
    std::string get_string(const std::string& dotted, const std::string& fallback);

    // Throws, listing every key that was never consumed.
    void reject_unknown() const;

  private:
    struct Entry {
        std::string value;
        int line = 0;
        bool consumed = false;
    };
    std::map<std::string, Entry> entries_;
    std::string origin_ = "<inline>";

    const std::string* lookup(const std::string& dotted);
    [[noreturn]] void fail(const std::string& dotted, const std::string& why) const;
};

}  // namespace chmhd
