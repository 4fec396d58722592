#include "cmin/cli.hpp"

int main(int argc, char** argv) { return cmin::cli::run(argc, argv); }
