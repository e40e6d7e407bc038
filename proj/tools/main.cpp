#include "distortion_lab/cli.hpp"

int main(int argc, char** argv) { return distortion_lab::cli::run_cli(argc, argv); }
