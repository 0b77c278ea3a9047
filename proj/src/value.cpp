#include "evagg/value.hpp"

#include <arpa/inet.h>

#include <charconv>
#include <cstring>
#include <functional>

#include "evagg/errors.hpp"
#include "evagg/time_format.hpp"

namespace evagg {

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::text:
      return "text";
    case FeatureKind::integer:
      return "integer";
    case FeatureKind::ipaddr:
      return "ipaddr";
    case FeatureKind::timestamp:
      return "timestamp";
  }
  return "text";
}

std::optional<FeatureKind> parse_feature_kind(std::string_view name) {
  if (name == "text") return FeatureKind::text;
  if (name == "integer") return FeatureKind::integer;
  if (name == "ipaddr") return FeatureKind::ipaddr;
  if (name == "timestamp") return FeatureKind::timestamp;
  return std::nullopt;
}

std::optional<IpAddress> IpAddress::parse(std::string_view text) {
  if (text.empty() || text.size() >= INET6_ADDRSTRLEN) return std::nullopt;
  char buf[INET6_ADDRSTRLEN];
  std::memcpy(buf, text.data(), text.size());
  buf[text.size()] = '\0';

  IpAddress ip;
  if (text.find(':') == std::string_view::npos) {
    in_addr a{};
    if (inet_pton(AF_INET, buf, &a) != 1) return std::nullopt;
    std::memcpy(ip.bytes_.data(), &a, 4);
    return ip;
  }
  in6_addr a{};
  if (inet_pton(AF_INET6, buf, &a) != 1) return std::nullopt;
  ip.v6_ = true;
  std::memcpy(ip.bytes_.data(), &a, 16);
  return ip;
}

IpAddress IpAddress::v4(std::uint32_t host_order) {
  IpAddress ip;
  ip.bytes_[0] = static_cast<std::uint8_t>(host_order >> 24);
  ip.bytes_[1] = static_cast<std::uint8_t>(host_order >> 16);
  ip.bytes_[2] = static_cast<std::uint8_t>(host_order >> 8);
  ip.bytes_[3] = static_cast<std::uint8_t>(host_order);
  return ip;
}

std::uint32_t IpAddress::v4_value() const {
  return (std::uint32_t{bytes_[0]} << 24) | (std::uint32_t{bytes_[1]} << 16) |
         (std::uint32_t{bytes_[2]} << 8) | std::uint32_t{bytes_[3]};
}

std::string IpAddress::to_string() const {
  char buf[INET6_ADDRSTRLEN];
  if (!v6_) {
    in_addr a{};
    std::memcpy(&a, bytes_.data(), 4);
    inet_ntop(AF_INET, &a, buf, sizeof buf);
  } else {
    in6_addr a{};
    std::memcpy(&a, bytes_.data(), 16);
    inet_ntop(AF_INET6, &a, buf, sizeof buf);
  }
  return buf;
}

std::optional<FeatureKind> kind_of(const FeatureValue& v) {
  switch (v.index()) {
    case 1:
      return FeatureKind::text;
    case 2:
      return FeatureKind::integer;
    case 3:
      return FeatureKind::ipaddr;
    case 4:
      return FeatureKind::timestamp;
    default:
      return std::nullopt;
  }
}

std::string to_text(const FeatureValue& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const IpAddress& ip) const { return ip.to_string(); }
    std::string operator()(Timestamp ts) const { return format_iso8601(ts); }
  };
  return std::visit(Visitor{}, v);
}

FeatureValue parse_value(FeatureKind kind, std::string_view text) {
  switch (kind) {
    case FeatureKind::text:
      return std::string(text);
    case FeatureKind::integer: {
      std::int64_t out = 0;
      const char* first = text.data();
      const char* last = text.data() + text.size();
      if (!text.empty() && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, out);
      if (text.empty() || ec != std::errc{} || ptr != last) {
        throw TypeMismatch("not an integer: '" + std::string(text) + "'");
      }
      return out;
    }
    case FeatureKind::ipaddr: {
      auto ip = IpAddress::parse(text);
      if (!ip) throw TypeMismatch("not an IP address: '" + std::string(text) + "'");
      return *ip;
    }
    case FeatureKind::timestamp: {
      auto ts = parse_iso8601(text);
      if (!ts) throw TypeMismatch("not an ISO-8601 timestamp: '" + std::string(text) + "'");
      return *ts;
    }
  }
  throw TypeMismatch("unknown feature kind");
}

std::size_t hash_value(const FeatureValue& v) {
  std::size_t seed = v.index() * 0x9e3779b97f4a7c15ULL;
  auto mix = [&seed](std::size_t h) { seed ^= h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2); };
  switch (v.index()) {
    case 1:
      mix(std::hash<std::string>{}(std::get<std::string>(v)));
      break;
    case 2:
      mix(std::hash<std::int64_t>{}(std::get<std::int64_t>(v)));
      break;
    case 3: {
      const auto& b = std::get<IpAddress>(v).bytes();
      std::uint64_t hi = 0, lo = 0;
      std::memcpy(&hi, b.data(), 8);
      std::memcpy(&lo, b.data() + 8, 8);
      mix(std::hash<std::uint64_t>{}(hi));
      mix(std::hash<std::uint64_t>{}(lo));
      break;
    }
    case 4:
      mix(std::hash<std::int64_t>{}(std::get<Timestamp>(v).epoch_ms));
      break;
    default:
      break;
  }
  return seed;
}

}  // namespace evagg
