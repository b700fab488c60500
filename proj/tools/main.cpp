#include "fairkit/cli.hpp"

int main(int argc, char** argv) { return fairkit::cli::cli_main(argc, argv); }
