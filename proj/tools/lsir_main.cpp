#include "lsir/cli.hpp"

int main(int argc, char** argv) { return lsir::cli_main(argc, argv); }
