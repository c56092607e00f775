#include "wld/cli.hpp"

int main(int argc, char** argv) { return wld::main_entry(argc, argv); }
