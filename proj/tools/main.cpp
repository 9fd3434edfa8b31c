#include "sceptre/cli.hpp"

int main(int argc, char** argv) { return sceptre::run_cli(argc, argv); }
