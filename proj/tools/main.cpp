#include "cli.hpp"

int main(int argc, char** argv) { return opsum::cli::run(argc, argv); }
