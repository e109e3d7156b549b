#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace adiaqnn {

// 17 significant digits, enough to round-trip any double.
std::string format_number(double x);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    CsvWriter& cell(double x);
    CsvWriter& cell(long long x);
    CsvWriter& cell(std::string_view text);
    void end_row();
    void close();

private:
    std::ofstream out_;
    std::filesystem::path path_;
    std::size_t columns_ = 0;
    std::size_t in_row_ = 0;
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct ManifestEntry {
    std::string path;   // relative to the output directory for outputs
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunManifest {
    std::string command;
    std::string version;
    std::string started;
    std::string finished;
    nlohmann::json config;
    nlohmann::json results;
    std::vector<ManifestEntry> inputs;
    std::vector<ManifestEntry> outputs;

    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& dir, const std::string& name);
    nlohmann::json to_json() const;
};

inline constexpr const char* kManifestName = "manifest.json";

std::string utc_timestamp();
void write_manifest(const RunManifest& m, const std::filesystem::path& dir);
// Problems found (missing or altered files); empty when every hash matches.
std::vector<std::string> verify_manifest(const std::filesystem::path& dir);

}  // namespace adiaqnn
