#include "adiaqnn/output.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace adiaqnn {

std::string format_number(double x) {
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", x);
    return buf.data();
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
    for (const auto& h : header) cell(std::string_view(h));
    end_row();
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    if (in_row_ > 0) out_ << ',';
    out_ << text;
    ++in_row_;
    return *this;
}

CsvWriter& CsvWriter::cell(double x) { return cell(std::string_view(format_number(x))); }
CsvWriter& CsvWriter::cell(long long x) { return cell(std::string_view(std::to_string(x))); }

void CsvWriter::end_row() {
    if (in_row_ != columns_) throw std::logic_error("CSV row width does not match header in " + path_.string());
    out_ << '\n';
    in_row_ = 0;
}

void CsvWriter::close() {
    out_.close();
    if (!out_) throw std::runtime_error("failed writing '" + path_.string() + "'");
}

namespace {

std::string hex(const unsigned char* d, unsigned n) {
    std::ostringstream os;
    for (unsigned i = 0; i < n; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(d[i]);
    return os.str();
}

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;
    void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }
    std::string finish() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned len = 0;
        EVP_DigestFinal_ex(ctx_, md, &len);
        return hex(md, len);
    }

private:
    EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.finish();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.finish();
}

void RunManifest::add_input(const std::filesystem::path& path) {
    inputs.push_back({std::filesystem::absolute(path).string(), sha256_file(path), std::filesystem::file_size(path)});
}

void RunManifest::add_output(const std::filesystem::path& dir, const std::string& name) {
    outputs.push_back({name, sha256_file(dir / name), std::filesystem::file_size(dir / name)});
}

nlohmann::json RunManifest::to_json() const {
    auto entries = [](const std::vector<ManifestEntry>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& e : v) a.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
        return a;
    };
    return {{"command", command}, {"version", version},     {"started", started},
            {"finished", finished}, {"config", config},     {"results", results},
            {"inputs", entries(inputs)}, {"outputs", entries(outputs)}};
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_manifest(const RunManifest& m, const std::filesystem::path& dir) {
    std::ofstream out(dir / kManifestName, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest in '" + dir.string() + "'");
    out << m.to_json().dump(2) << '\n';
}

std::vector<std::string> verify_manifest(const std::filesystem::path& dir) {
    std::ifstream in(dir / kManifestName);
    if (!in) return {"manifest.json is missing"};
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error&) {
        return {"manifest.json is not valid JSON"};
    }
    std::vector<std::string> problems;
    for (const auto& e : j.value("outputs", nlohmann::json::array())) {
        const std::string name = e.value("path", "");
        const auto p = dir / name;
        if (!std::filesystem::exists(p)) {
            problems.push_back(name + ": missing");
            continue;
        }
        if (sha256_file(p) != e.value("sha256", "")) problems.push_back(name + ": content hash mismatch");
    }
    return problems;
}

}  // namespace adiaqnn
