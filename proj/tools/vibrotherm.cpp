#include "vibrotherm/cli.hpp"

int main(int argc, char** argv) { return vibrotherm::cli::run(argc, argv); }
