#include "qpl/cli.hpp"

int main(int argc, char** argv) { return qpl::run_cli(argc, argv); }
