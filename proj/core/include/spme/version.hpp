#ifndef SPME_VERSION_HPP
#define SPME_VERSION_HPP

namespace spme {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spme

#endif
