#pragma once

// Plain-text point files: one point per line, values in %.16e separated by
// a single space, LF endings. 17 significant digits round-trip every double.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "moea/core.hpp"

namespace moea {

class IoError : public std::runtime_error {
public:
    IoError(const std::string& what, const std::filesystem::path& path)
        : std::runtime_error(what + ": " + path.string()), path_(path) {}

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline std::string format_points(const std::vector<ObjectiveVector>& points)
{
    std::string out;
    out.reserve(points.size() * 48);
    for (const auto& p : points) {
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (k) out += ' ';
            out += format_real(p[k]);
        }
        out += '\n';
    }
    return out;
}

inline std::vector<ObjectiveVector> parse_points(const std::string& text)
{
    std::vector<ObjectiveVector> points;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ObjectiveVector p;
        const char* cur = line.c_str();
        char* end = nullptr;
        while (*cur != '\0') {
            const double v = std::strtod(cur, &end);
            if (end == cur) throw std::runtime_error("malformed point row: " + line);
            p.push_back(v);
            cur = end;
            while (*cur == ' ') ++cur;
        }
        if (!points.empty() && points.front().size() != p.size())
            throw std::runtime_error("inconsistent point dimension in row: " + line);
        points.push_back(std::move(p));
    }
    return points;
}

inline std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Writes through a sibling temp file and renames it into place, so readers
/// never observe a partially written file.
inline void write_text_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory", path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing", tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed", tmp);
    }
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename into place", path);
}

inline std::vector<ObjectiveVector> read_points(const std::filesystem::path& path)
{
    return parse_points(read_text_file(path));
}

inline void write_points(const std::filesystem::path& path, const std::vector<ObjectiveVector>& points)
{
    write_text_file_atomic(path, format_points(points));
}

} // namespace moea
