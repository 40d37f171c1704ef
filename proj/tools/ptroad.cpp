#include "ptroad/cli/commands.hpp"

int main(int argc, char** argv) { return ptroad::cli::run_cli(argc, argv); }
