#include "evagg/time_format.hpp"

#include <array>
#include <cctype>
#include <chrono>
#include <cstdio>

namespace evagg {

namespace {

using namespace std::chrono;

constexpr std::int64_t kMsPerDay = 86'400'000;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::optional<Timestamp> to_timestamp(int year, unsigned month, unsigned day, unsigned hour,
                                      unsigned minute, unsigned second, unsigned millis) {
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60 || millis > 999) {
    return std::nullopt;
  }
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return Timestamp{days * kMsPerDay + ((hour * 60 + minute) * 60 + second) * 1000LL + millis};
}

constexpr std::array<std::string_view, 12> kMonths = {"jan", "feb", "mar", "apr", "may", "jun",
                                                       "jul", "aug", "sep", "oct", "nov", "dec"};

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }
  void advance() { ++pos_; }

  /// Reads between min and max digits.
  std::optional<unsigned> digits(std::size_t min, std::size_t max, std::size_t* count = nullptr) {
    unsigned v = 0;
    std::size_t n = 0;
    while (n < max && !done() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + static_cast<unsigned>(peek() - '0');
      advance();
      ++n;
    }
    if (count) *count = n;
    if (n < min) return std::nullopt;
    return v;
  }

  void skip_spaces() {
    while (!done() && peek() == ' ') advance();
  }

  std::optional<unsigned> month_name() {
    if (pos_ + 3 > s_.size()) return std::nullopt;
    std::array<char, 3> m{};
    for (std::size_t i = 0; i < 3; ++i) {
      m[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(s_[pos_ + i])));
    }
    for (std::size_t i = 0; i < kMonths.size(); ++i) {
      if (std::string_view(m.data(), 3) == kMonths[i]) {
        pos_ += 3;
        return static_cast<unsigned>(i + 1);
      }
    }
    return std::nullopt;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Timestamp make_timestamp(int year, unsigned month, unsigned day, unsigned hour, unsigned minute,
                         unsigned second, unsigned millis) {
  auto ts = to_timestamp(year, month, day, hour, minute, second, millis);
  return ts.value_or(Timestamp{});
}

std::string format_iso8601(Timestamp ts) {
  const std::int64_t days = floor_div(ts.epoch_ms, kMsPerDay);
  const std::int64_t rem = ts.epoch_ms - days * kMsPerDay;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  const auto ms = rem % 1000;
  const auto secs = rem / 1000;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<long long>(secs / 3600),
                static_cast<long long>((secs / 60) % 60), static_cast<long long>(secs % 60),
                static_cast<long long>(ms));
  return buf;
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  return parse_time(text, "%Y-%m-%dT%H:%M:%S%fZ");
}

std::optional<Timestamp> parse_time(std::string_view text, std::string_view format,
                                    int default_year) {
  Cursor in(text);
  int year = default_year;
  unsigned month = 1, day = 1, hour = 0, minute = 0, second = 0, millis = 0;

  for (std::size_t i = 0; i < format.size(); ++i) {
    const char f = format[i];
    if (f == ' ') {
      if (in.peek() != ' ') return std::nullopt;
      in.skip_spaces();
      continue;
    }
    if (f != '%') {
      if (in.peek() != f) return std::nullopt;
      in.advance();
      continue;
    }
    if (++i >= format.size()) return std::nullopt;
    std::optional<unsigned> v;
    switch (format[i]) {
      case 'Y':
        v = in.digits(4, 4);
        if (v) year = static_cast<int>(*v);
        break;
      case 'y':
        v = in.digits(2, 2);
        if (v) year = static_cast<int>(*v < 69 ? 2000 + *v : 1900 + *v);
        break;
      case 'm':
        v = in.digits(1, 2);
        if (v) month = *v;
        break;
      case 'd':
      case 'e':
        in.skip_spaces();
        v = in.digits(1, 2);
        if (v) day = *v;
        break;
      case 'H':
        v = in.digits(1, 2);
        if (v) hour = *v;
        break;
      case 'M':
        v = in.digits(2, 2);
        if (v) minute = *v;
        break;
      case 'S':
        v = in.digits(2, 2);
        if (v) second = *v;
        break;
      case 'f': {
        // Optional fractional seconds: "." followed by 1-9 digits, truncated to ms.
        if (in.peek() != '.' && in.peek() != ',') {
          v = 0u;
          break;
        }
        in.advance();
        std::size_t n = 0;
        v = in.digits(1, 9, &n);
        if (v) {
          unsigned frac = *v;
          for (; n > 3; --n) frac /= 10;
          for (; n < 3; ++n) frac *= 10;
          millis = frac;
        }
        break;
      }
      case 'b':
        v = in.month_name();
        if (v) month = *v;
        break;
      case '%':
        if (in.peek() != '%') return std::nullopt;
        in.advance();
        v = 0u;
        break;
      default:
        return std::nullopt;
    }
    if (!v) return std::nullopt;
  }
  if (!in.done()) return std::nullopt;
  return to_timestamp(year, month, day, hour, minute, second, millis);
}

}  // namespace evagg
