#include "supertoroid/cli.hpp"

int main(int argc, char** argv) { return supertoroid::cli_main(argc, argv); }
