#ifndef SCBENCH_CLI_HPP
#define SCBENCH_CLI_HPP

#include <string>
#include <vector>

namespace scbench {

/**
 * Command-line entry point. Subcommands: split, qc, filter, normalize, embed, cluster, evaluate, report, synth, pipeline.
 *
 * Returns 0 on success, 2 for usage errors and 1 for data errors; errors are printed to stderr as a one-line JSON object.
 */
int cli_main(int argc, char** argv);

int cli_main(const std::vector<std::string>& args);

}

#endif
