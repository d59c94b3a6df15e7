#ifndef FLOODBAYES_VERSION_HPP
#define FLOODBAYES_VERSION_HPP

namespace floodbayes {

inline constexpr const char* version = "0.1.0";

} // namespace floodbayes

#endif
