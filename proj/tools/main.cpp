#include "straintomo/cli.hpp"

int main(int argc, char** argv) { return straintomo::cli_main(argc, argv); }
