#include "mlbandit/harness.hpp"

int main(int argc, char** argv) { return mlbandit::cli_main(argc, argv); }
