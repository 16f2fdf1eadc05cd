#pragma once

namespace lsir {

/// Command-line entry point. Exit codes: 0 ok, 2 data error, 3 numerical
/// failure, 64 usage error.
int cli_main(int argc, char** argv);

} // namespace lsir
