#include "bstab/artifacts.hpp"

namespace bstab {

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw InputError("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void ArtifactWriter::write_manifest(const std::string& label, bool complete,
                                    const std::string& failed_stage, const std::string& error) const {
  std::ofstream out(dir_ / "MANIFEST");
  out << "run: " << label << "\n";
  out << "status: " << (complete ? "complete" : "incomplete") << "\n";
  if (!complete) {
    out << "failed_stage: " << failed_stage << "\n";
    out << "error: " << error << "\n";
  }
  for (const auto& f : files_) out << "file: " << f << "\n";
}

}  // namespace bstab
