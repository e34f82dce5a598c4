#include "rwalk/cli.hpp"

int main(int argc, char** argv) { return rwalk::cli::run_cli(argc, argv); }
