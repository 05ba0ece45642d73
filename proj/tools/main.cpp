#include "nfem/cli.hpp"

int main(int argc, char** argv) { return nfem::cli_main(argc, argv); }
