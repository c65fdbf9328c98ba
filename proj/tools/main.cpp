#include <csignal>
#include <iostream>

#include "cli.hpp"

namespace {
extern "C" void on_signal(int) { emodec::cli::interrupt_flag().store(true); }
}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::vector<std::string> args(argv, argv + argc);
  return emodec::cli::run(args, std::cout, std::cerr);
}
