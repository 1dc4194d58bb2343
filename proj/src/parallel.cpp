#include "ploewner/parallel.hpp"

#include <cstdlib>
#include <string>

namespace ploewner {

unsigned default_thread_count() {
    if (const char* env = std::getenv("PLOEWNER_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
            // fall through to hardware concurrency
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace ploewner
