#include "thermolie/cli/commands.hpp"

int main(int argc, char** argv) { return thermolie::cli::run_cli(argc, argv); }
