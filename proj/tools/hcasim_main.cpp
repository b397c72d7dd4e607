#include "hcasim/cli_app.hpp"

int main(int argc, char** argv) { return hcasim::run_cli(argc, argv); }
