#ifndef HDPD_INTERFACE_CLI_H_
#define HDPD_INTERFACE_CLI_H_

#include <iosfwd>

namespace hdpd::interface {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Subcommands: gen-synthetic, ingest, label, train, tune-k, diagram, batch,
// evaluate, serve, plot. Every subcommand takes --workspace (default ".").
// Returns kExitUsage for bad command lines, kExitFailure when the command
// itself fails.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hdpd::interface

#endif  // HDPD_INTERFACE_CLI_H_
