#include "cli.hpp"

int main(int argc, char** argv) { return bstab::cli::run(argc, argv); }
