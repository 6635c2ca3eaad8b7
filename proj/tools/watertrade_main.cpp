#include "watertrade/cli.hpp"

int main(int argc, char** argv) { return watertrade::cli::run(argc, argv); }
