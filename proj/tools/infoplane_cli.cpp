#include "cli_support.hpp"

int main(int argc, char** argv) { return infoplane::cli::run(argc, argv); }
