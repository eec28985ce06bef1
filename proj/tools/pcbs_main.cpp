#include "pcbs/cli.hpp"

int main(int argc, char** argv) { return pcbs::cli::run(argc, argv); }
