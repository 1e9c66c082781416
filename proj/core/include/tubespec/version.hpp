#ifndef TUBESPEC_VERSION_HPP
#define TUBESPEC_VERSION_HPP

namespace tubespec {

inline constexpr const char* kVersion = "0.1.0";

} // namespace tubespec

#endif
