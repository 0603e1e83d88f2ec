#pragma once

namespace bstab::cli {

/// Parses the command line and runs one subcommand; returns the process exit code
/// (0 pass, 1 bound violation, 2 configuration error, 3 numerical failure).
[[nodiscard]] int run(int argc, char** argv);

}  // namespace bstab::cli
