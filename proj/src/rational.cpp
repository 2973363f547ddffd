#include "mpg/rational.hpp"

#include <sstream>
#include <stdexcept>

namespace mpg {

namespace {

bool valid_int_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

}  // namespace

Rat parse_rat(const std::string& text) {
  std::string num = text;
  std::string den = "1";
  if (auto slash = text.find('/'); slash != std::string::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  if (!valid_int_token(num) || !valid_int_token(den)) {
    throw std::invalid_argument("malformed rational: '" + text + "'");
  }
  mpz_class n(num), d(den);
  if (d == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
  Rat r(n, d);
  r.canonicalize();
  return r;
}

std::string rat_to_string(const Rat& r) {
  std::ostringstream os;
  os << r.get_num();
  if (r.get_den() != 1) os << '/' << r.get_den();
  return os.str();
}

std::vector<Rat> parse_rat_list(const std::string& text) {
  std::vector<Rat> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ',')) out.push_back(parse_rat(cur));
  if (out.empty()) throw std::invalid_argument("empty rational list");
  return out;
}

}  // namespace mpg
