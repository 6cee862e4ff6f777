#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace testing_support {

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("metricsig-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

    std::filesystem::path write(const std::string& name, const std::string& content) const {
        const auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

/// CSV with `positives` ones first; pair keys k0..k{n-1} when requested.
inline std::string verdict_csv(std::size_t n, std::size_t positives, bool pair_keys = false) {
    std::string out = pair_keys ? "id,verdict,pair_key\n" : "id,verdict\n";
    for (std::size_t i = 0; i < n; ++i) {
        out += "r" + std::to_string(i) + "," + (i < positives ? "1" : "0");
        if (pair_keys) out += ",k" + std::to_string(i);
        out += "\n";
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing_support
