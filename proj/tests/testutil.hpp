#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include "common.hpp"

namespace testutil {

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = base / ("qoqa-test-" + std::to_string(rd()) + "-" +
                        std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string dir() const { return path_.string(); }

    std::string write(const std::string& name, const std::string& contents) const {
        std::string p = file(name);
        qoqa::write_file(p, contents);
        return p;
    }

private:
    std::filesystem::path path_;
};

}  // namespace testutil
