#include "etale/cli.hpp"

int main(int argc, char** argv) { return etale::cli::main_entry(argc, argv); }
