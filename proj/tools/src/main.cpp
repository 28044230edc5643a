#include "lipcausal_cli/cli.hpp"

int main(int argc, char** argv) { return lipcausal::cli::run(argc, argv); }
