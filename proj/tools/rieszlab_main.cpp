#include "rieszlab/run.hpp"

int main(int argc, char** argv) { return rieszlab::run(argc, argv); }
