#include "gcenter/crystal.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>

#include "gcenter/error.hpp"
#include "gcenter/units.hpp"

namespace gcenter {

namespace units {

double wrap_half_turn_deg(double deg)
{
  double wrapped = std::fmod(deg, 180.0);
  if (wrapped < 0) wrapped += 180.0;
  if (wrapped >= 180.0 - 1e-9) wrapped = 0.0;
  return wrapped;
}

double angle_difference_deg(double a, double b)
{
  double d = wrap_half_turn_deg(a - b);
  return d > 90.0 ? d - 180.0 : d;
}

}  // namespace units

SiteSet::SiteSet(std::initializer_list<int> sites)
{
  for (int s : sites) insert(s);
}

SiteSet SiteSet::parse(const std::string& text)
{
  std::string trimmed;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '{' && c != '}') trimmed.push_back(c);
  if (trimmed == "all") return all();
  SiteSet set;
  std::size_t pos = 0;
  while (pos < trimmed.size()) {
    std::size_t comma = trimmed.find(',', pos);
    if (comma == std::string::npos) comma = trimmed.size();
    int site = -1;
    auto [ptr, ec] = std::from_chars(trimmed.data() + pos, trimmed.data() + comma, site);
    if (ec != std::errc{} || ptr != trimmed.data() + comma)
      fail(ErrorKind::invalid_argument, "cannot parse site list '" + text + "'");
    set.insert(site);
    pos = comma + 1;
  }
  return set;
}

int SiteSet::size() const { return std::popcount(bits_); }

std::vector<int> SiteSet::sites() const
{
  std::vector<int> out;
  for (int n = 0; n < kSiteCount; ++n)
    if (contains(n)) out.push_back(n);
  return out;
}

void SiteSet::insert(int site)
{
  if (site < 0 || site >= kSiteCount)
    fail(ErrorKind::invalid_argument, "site index " + std::to_string(site) + " outside [0,5]");
  bits_ = static_cast<std::uint8_t>(bits_ | (1u << site));
}

SiteSet SiteSet::inverted() const
{
  SiteSet out;
  for (int n : sites()) out.insert(inversion_partner(n));
  return out;
}

std::string SiteSet::to_string() const
{
  std::string out = "{";
  bool first = true;
  for (int n : sites()) {
    if (!first) out += ',';
    out += std::to_string(n);
    first = false;
  }
  return out + "}";
}

Eigen::Vector3d Miller::unit() const
{
  if (is_zero()) fail(ErrorKind::invalid_argument, "zero crystal direction");
  return vector().normalized();
}

std::string Miller::to_string() const
{
  std::string out = "[";
  for (int v : {h, k, l}) out += std::to_string(v);
  return out + "]";
}

Miller Miller::parse(const std::string& text)
{
  std::string body;
  for (char c : text)
    if (c != '[' && c != ']' && !std::isspace(static_cast<unsigned char>(c))) body.push_back(c);

  std::vector<int> values;
  if (body.find(',') != std::string::npos) {
    std::size_t pos = 0;
    while (pos <= body.size()) {
      std::size_t comma = std::min(body.find(',', pos), body.size());
      int v = 0;
      auto [ptr, ec] = std::from_chars(body.data() + pos, body.data() + comma, v);
      if (ec != std::errc{} || ptr != body.data() + comma)
        fail(ErrorKind::invalid_argument, "cannot parse direction '" + text + "'");
      values.push_back(v);
      pos = comma + 1;
    }
  } else {
    // Compact form: single digits with optional leading minus, "1-10".
    for (std::size_t i = 0; i < body.size(); ++i) {
      int sign = 1;
      if (body[i] == '-') {
        sign = -1;
        ++i;
      }
      if (i >= body.size() || !std::isdigit(static_cast<unsigned char>(body[i])))
        fail(ErrorKind::invalid_argument, "cannot parse direction '" + text + "'");
      values.push_back(sign * (body[i] - '0'));
    }
  }
  if (values.size() != 3) fail(ErrorKind::invalid_argument, "direction '" + text + "' needs 3 indices");
  Miller m{values[0], values[1], values[2]};
  if (m.is_zero()) fail(ErrorKind::invalid_argument, "zero crystal direction");
  return m;
}

bool is_111_family(const Miller& axis)
{
  return std::abs(axis.h) == 1 && std::abs(axis.k) == 1 && std::abs(axis.l) == 1;
}

const std::array<Miller, 4>& defect_orientations()
{
  static const std::array<Miller, 4> kOrientations{
      Miller{1, 1, 1}, Miller{-1, 1, 1}, Miller{1, -1, 1}, Miller{-1, -1, 1}};
  return kOrientations;
}

}  // namespace gcenter
