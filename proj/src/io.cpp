#include "cnca/io.hpp"

#include <fstream>
#include <system_error>

#include "cnca/error.hpp"

namespace cnca {

void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill, bool binary) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    try {
        {
            std::ofstream out(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
            fill(out);
            out.flush();
            if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
        }
        fs::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

}  // namespace cnca
