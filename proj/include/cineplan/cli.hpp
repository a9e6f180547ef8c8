#ifndef CINEPLAN_CLI_HPP_
#define CINEPLAN_CLI_HPP_

namespace cineplan {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;   // bad flags or config files
inline constexpr int kExitRuntimeError = 3;  // a run that started but failed
inline constexpr int kExitPartialBench = 4;  // benchmark finished with failed seeds

// Full command-line entry point (plan / sim / bench / tsdf). Never throws;
// errors map to the exit codes above. Callable in-process, which is how the
// CLI tests drive it.
int run_cli(int argc, const char* const* argv);

}  // namespace cineplan

#endif  // CINEPLAN_CLI_HPP_
