#include "reflev/run.hpp"

int main(int argc, char** argv) { return reflev::run_cli(argc, argv); }
