#include "qsol/cli.hpp"

int main(int argc, char** argv) { return qsol::cli::run(argc, argv); }
