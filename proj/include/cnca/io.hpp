#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>

namespace cnca {

/// Writes through `fill` into a temporary file beside `path`, then renames it
/// over `path`. On any error the temporary is removed and `path` is untouched.
void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill,
                       bool binary = false);

}  // namespace cnca
