#include "symito/cli.hpp"

int main(int argc, char** argv) { return symito::run_cli(argc, argv); }
