#include "laica/harness/cli.hpp"

int main(int argc, char** argv) { return laica::cli_dispatch(argc, argv); }
