#include "modshadow/cli.hpp"

int main(int argc, char** argv) { return modshadow::cli_main(argc, argv); }
