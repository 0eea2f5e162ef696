#ifndef SPX_VERSION_HPP
#define SPX_VERSION_HPP

namespace spx {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spx

#endif
