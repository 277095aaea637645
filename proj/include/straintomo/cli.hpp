#pragma once

namespace straintomo {

/// Entry point of the `straintomo` command-line tool. Returns 0 on success;
/// failures print "error [stage]: message" to stderr and return nonzero.
int cli_main(int argc, char** argv);

}  // namespace straintomo
