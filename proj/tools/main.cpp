#include "isingps/cli.hpp"

int main(int argc, char** argv) { return isingps::run_cli(argc, argv); }
