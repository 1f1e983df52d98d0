#ifndef NRE_LOG_HPP
#define NRE_LOG_HPP

#include <string>

namespace nre {

using WarnSink = void (*)(const std::string&);

/// Emits a non-fatal warning to the current sink (stderr by default).
void warn(const std::string& message);

/// Replaces the warning sink; pass nullptr to restore the default.
/// Returns the previous sink.
WarnSink set_warn_sink(WarnSink sink);

} // namespace nre

#endif
