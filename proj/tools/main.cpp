#include "app.hpp"

int main(int argc, char** argv) { return rulehier::run_cli(argc, argv); }
