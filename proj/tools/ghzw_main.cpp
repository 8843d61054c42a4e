#include "ghzw/cli.hpp"

int main(int argc, char** argv) { return ghzw::run_cli(argc, argv); }
