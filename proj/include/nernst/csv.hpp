#ifndef NERNST_CSV_HPP
#define NERNST_CSV_HPP

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

namespace nernst {

/// 17 significant digits, so every double round-trips exactly.
inline std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_number(long double v)
{
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.17Lg", v);
    return buf;
}

template <typename Int>
    requires std::is_integral_v<Int>
std::string format_number(Int v)
{
    return std::to_string(v);
}

/// Empty field for a missing value.
template <typename T>
std::string format_optional(const std::optional<T>& v)
{
    return v ? format_number(*v) : std::string();
}

/// Writes one comma-separated row terminated by LF.
inline void write_row(std::ostream& os, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            os << ',';
        os << fields[i];
    }
    os << '\n';
}

} // namespace nernst

#endif // NERNST_CSV_HPP
