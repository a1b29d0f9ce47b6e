#include "nsmds/cli.hpp"

int main(int argc, char** argv) { return nsmds::run_cli(argc, argv); }
