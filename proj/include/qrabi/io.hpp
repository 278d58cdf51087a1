#pragma once
// Output plumbing: locale-independent CSV writing, FNV-1a content hashing,
// and the run manifest serialized next to every produced file.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qrabi {

inline constexpr const char* kVersion = "1.0.0";

// Shortest round-trip decimal form of x (std::to_chars), locale-independent.
std::string format_double(double x);

// One CSV cell per entry; numbers must be preformatted. Rows end in LF.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& cells);
    void close();

private:
    struct Impl;
    Impl* impl_;
};

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

// Provenance record written as manifest.json next to a run's outputs.
struct RunManifest {
    std::string command;                          // subcommand name
    std::string command_line;                     // verbatim invocation
    std::map<std::string, std::string> config;    // fully resolved options
    std::string version = kVersion;
    std::string timestamp;                        // ISO-8601 UTC, set at write time
    std::map<std::string, std::string> input_hashes;  // path -> fnv1a64 hex
    std::uint64_t seed = 0;

    void add_option(const std::string& key, const std::string& value) {
        config[key] = value;
    }
    void hash_input(const std::string& path);
    // with_timestamp=false is used when embedding the manifest inside a
    // report, keeping report files bitwise reproducible across reruns.
    std::string to_json(bool with_timestamp = true) const;
    void write(const std::string& path) const;
};

std::string iso8601_utc_now();

// Minimal JSON value assembly for flat report objects (numbers kept as
// preformatted strings so output is locale-independent and diffable).
class JsonObject {
public:
    void put(const std::string& key, const std::string& string_value);
    void put_raw(const std::string& key, const std::string& raw_json);
    void put_number(const std::string& key, double v);
    void put_int(const std::string& key, long long v);
    void put_bool(const std::string& key, bool v);
    std::string str(int indent = 2) const;

private:
    std::vector<std::pair<std::string, std::string>> items_;  // key -> raw json
};

std::string json_escape(const std::string& s);
std::string json_number_array(const std::vector<double>& v);

}  // namespace qrabi
