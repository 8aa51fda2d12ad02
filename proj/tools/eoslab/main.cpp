#include "eoslab/cli_io.hpp"

int main(int argc, char** argv) { return eoslab::cli::run(argc, argv); }
