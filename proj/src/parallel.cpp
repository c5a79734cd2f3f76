#include "mdx/parallel.hpp"

#include <cstdlib>
#include <string>

namespace mdx {

int default_workers() {
    if (const char* env = std::getenv("MDX_WORKERS")) {
        try {
            const int w = std::stoi(env);
            if (w > 0) return w;
        } catch (const std::exception&) {
            // fall through to hardware concurrency
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace mdx
