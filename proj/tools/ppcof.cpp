#include "ppcof/cli.hpp"

int main(int argc, char** argv) { return ppcof::cli::run(argc, argv); }
