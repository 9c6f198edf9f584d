#include "cli.hpp"

int main(int argc, char** argv) { return faraday::cli::main(argc, argv); }
