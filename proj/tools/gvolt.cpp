#include "gvolt/cli.hpp"

int main(int argc, char** argv) { return gvolt::cli::run(argc, argv); }
