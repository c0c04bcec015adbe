#ifndef LRGCCF_COMMON_HPP_
#define LRGCCF_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lrgccf {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values detected during optimization; maps to exit code 3 in the CLI.
struct NumericalError : Error {
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Derive a named sub-seed from a master seed so components can be
// re-seeded independently (data, init, sampling, diagnostics).
inline std::uint64_t sub_seed(std::uint64_t master, const std::string& tag) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return mix64(master ^ h);
}

}  // namespace lrgccf

#endif
