#include "cli.hpp"

int main(int argc, char** argv) { return ccchart::cli::run(argc, argv); }
