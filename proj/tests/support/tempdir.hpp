#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

namespace fwdnet::test {

struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        std::random_device entropy;
        path = std::filesystem::temp_directory_path() /
               ("fwdnet_" + tag + "_" + std::to_string(entropy()) + "_" +
                std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    std::filesystem::path file(const std::string& name) const { return path / name; }
};

} // namespace fwdnet::test
