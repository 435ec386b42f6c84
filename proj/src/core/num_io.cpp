#include <trackref/core/num_io.hpp>

#include <charconv>
#include <system_error>

#include <trackref/core/errors.hpp>

namespace trackref {

std::string format_real(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_real(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("bad real value: '" + std::string(s) + "'");
    return v;
}

long parse_int(std::string_view s) {
    long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("bad integer value: '" + std::string(s) + "'");
    return v;
}

}  // namespace trackref
