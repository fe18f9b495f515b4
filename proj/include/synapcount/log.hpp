#pragma once

namespace synapcount {

/// Applies SYNAPCOUNT_LOG (error|warn|info|debug, default warn) to the default logger.
void init_logging_from_env();

}  // namespace synapcount
