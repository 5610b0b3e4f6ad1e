#include "trueset/cli.hpp"

int main(int argc, char** argv) { return trueset::cli::run(argc, argv); }
