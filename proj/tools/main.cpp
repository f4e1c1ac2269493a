#include "cli.hpp"

int main(int argc, char** argv) { return quanvnext::cli::main(argc, argv); }
