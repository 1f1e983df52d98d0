#include "nre/log.hpp"

#include <atomic>
#include <iostream>

namespace nre {

namespace {

std::atomic<WarnSink> g_sink{nullptr};

}

void warn(const std::string& message) {
    const WarnSink sink = g_sink.load();
    if (sink) {
        sink(message);
    } else {
        std::cerr << "warning: " << message << "\n";
    }
}

WarnSink set_warn_sink(WarnSink sink) { return g_sink.exchange(sink); }

} // namespace nre
