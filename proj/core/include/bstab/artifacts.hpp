#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bstab/errors.hpp"

namespace bstab {

/// Output directory that remembers what was written, for the MANIFEST.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  /// Opens `name` in the directory, hands the stream to `body`, records the file.
  template <class F>
  void write(const std::string& name, F&& body) {
    const auto path = dir_ / name;
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    body(out);
    if (!out) throw InputError("write failed for '" + path.string() + "'");
    files_.push_back(name);
  }

  /// MANIFEST listing every recorded file; when incomplete, also the failing stage and error.
  void write_manifest(const std::string& label, bool complete, const std::string& failed_stage = {},
                      const std::string& error = {}) const;

  [[nodiscard]] const std::vector<std::string>& files() const noexcept { return files_; }
  [[nodiscard]] const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

}  // namespace bstab
