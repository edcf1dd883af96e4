#include "riskfuse/cli.hpp"

int main(int argc, char** argv) { return riskfuse::cli::cli_main(argc, argv); }
