#ifndef QTRACK_VERSION_HPP
#define QTRACK_VERSION_HPP

namespace qtrack {
inline constexpr const char* kVersion = "1.0.0";
}

#endif  // QTRACK_VERSION_HPP
