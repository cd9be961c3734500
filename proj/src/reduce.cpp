#include "kdiff/reduce.hpp"

namespace kdiff {

double blocked_sum(std::span<const double> v) {
    return blocked_sum(v.size(), [&](std::size_t i) { return v[i]; });
}

namespace ref {

double blocked_sum(std::span<const double> v) {
    return blocked_sum(v.size(), [&](std::size_t i) { return v[i]; });
}

} // namespace ref
} // namespace kdiff
