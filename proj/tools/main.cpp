#include "commands.hpp"

int main(int argc, char** argv) { return sirspline::cli::run(argc, argv); }
