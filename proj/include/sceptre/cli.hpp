#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sceptre {

// Subcommands: synth, ingest, train, eval, recommend, explain, topics.
// Returns the process exit code; usage errors give 2, runtime failures 1.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace sceptre
