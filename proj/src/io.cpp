#include "qrabi/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace qrabi {

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

struct CsvWriter::Impl {
    std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->out.open(path, std::ios::binary);
    if (!impl_->out) throw std::runtime_error("cannot open " + path + " for writing");
}

CsvWriter::~CsvWriter() {
    delete impl_;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) impl_->out << ',';
        impl_->out << cells[i];
    }
    impl_->out << '\n';
}

void CsvWriter::close() {
    impl_->out.close();
    if (impl_->out.fail()) throw std::runtime_error("CSV write failed");
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string json_number_array(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v[i]);
    }
    out += "]";
    return out;
}

void JsonObject::put(const std::string& key, const std::string& string_value) {
    items_.emplace_back(key, "\"" + json_escape(string_value) + "\"");
}

void JsonObject::put_raw(const std::string& key, const std::string& raw_json) {
    items_.emplace_back(key, raw_json);
}

void JsonObject::put_number(const std::string& key, double v) {
    items_.emplace_back(key, format_double(v));
}

void JsonObject::put_int(const std::string& key, long long v) {
    items_.emplace_back(key, std::to_string(v));
}

void JsonObject::put_bool(const std::string& key, bool v) {
    items_.emplace_back(key, v ? "true" : "false");
}

std::string JsonObject::str(int indent) const {
    const std::string pad(indent, ' ');
    std::string out = "{\n";
    for (std::size_t i = 0; i < items_.size(); ++i) {
        out += pad + "\"" + json_escape(items_[i].first) + "\": " + items_[i].second;
        if (i + 1 < items_.size()) out += ",";
        out += "\n";
    }
    out += "}";
    return out;
}

void RunManifest::hash_input(const std::string& path) {
    input_hashes[path] = hex64(fnv1a64_file(path));
}

std::string RunManifest::to_json(bool with_timestamp) const {
    JsonObject o;
    o.put("command", command);
    if (!command_line.empty()) o.put("command_line", command_line);
    o.put("version", version);
    if (with_timestamp)
        o.put("timestamp", timestamp.empty() ? iso8601_utc_now() : timestamp);
    o.put_int("seed", static_cast<long long>(seed));
    JsonObject cfg;
    for (const auto& [k, v] : config) cfg.put(k, v);
    o.put_raw("config", cfg.str(4));
    JsonObject hashes;
    for (const auto& [k, v] : input_hashes) hashes.put(k, v);
    o.put_raw("input_hashes", hashes.str(4));
    return o.str(2);
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << to_json() << "\n";
    if (!out) throw std::runtime_error("manifest write failed");
}

}  // namespace qrabi
