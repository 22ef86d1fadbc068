#include "resub/cli.hpp"

int main(int argc, char** argv) { return resub::run_cli(argc, argv); }
