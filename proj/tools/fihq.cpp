#include "fihq/cli.hpp"

int main(int argc, char** argv) { return fihq::cli::run(argc, argv); }
