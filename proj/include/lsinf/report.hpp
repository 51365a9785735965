#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsinf/version.hpp"

namespace lsinf {

using nlohmann::json;

/// FNV-1a over the raw config bytes; embedded in every report so outputs can
/// be traced to the exact inputs that produced them.
inline std::uint64_t config_hash(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline json report_header(const std::string& config_bytes, std::uint64_t seed) {
    json j;
    j["tool_version"] = kVersion;
    j["config_hash"] = hash_hex(config_hash(config_bytes));
    j["seed"] = seed;
    return j;
}

/// Numeric formatting shared by the CSV writers: shortest representation
/// that round-trips, locale-independent.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // trim to shortest round-trip
    for (int prec = 1; prec < 17; ++prec) {
        char tmp[40];
        std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
        double back = std::strtod(tmp, nullptr);
        if (back == v) return tmp;
    }
    return buf;
}

/// RFC-4180 CSV (CRLF records). Values here are numeric or simple tokens, so
/// no quoting is needed.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << "\r\n";
    }

private:
    std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace lsinf
