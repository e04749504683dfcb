#include "occutime/cli.hpp"

int main(int argc, char** argv) { return occutime::run_cli(argc, argv); }
