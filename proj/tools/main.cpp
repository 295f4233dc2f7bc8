#include "cli/commands.hpp"

int main(int argc, char** argv) { return gridcascade::cli::main(argc, argv); }
