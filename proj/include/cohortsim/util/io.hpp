#pragma once

#include <filesystem>
#include <string>

namespace cohortsim::io {

// Reads a whole file into a string; throws DataError if unreadable.
std::string read_file(const std::filesystem::path& path);

// Writes `content` atomically: the bytes go to a temporary file in the same
// directory which is then renamed over `path`, so a crash mid-write never
// leaves a truncated file behind.  Parent directories are created on demand.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content);

// Formats a double with the shortest representation that round-trips,
// always using '.' as the decimal separator (locale independent).
std::string format_double(double value);

}  // namespace cohortsim::io
