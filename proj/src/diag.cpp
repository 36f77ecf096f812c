#include "ebv/diag.hpp"

namespace ebv {

std::string i128_str(i128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  // careful: -min fits in unsigned __int128
  unsigned __int128 u = neg ? (unsigned __int128)(-(v + 1)) + 1 : (unsigned __int128)v;
  std::string s;
  while (u != 0) {
    s.push_back(char('0' + (int)(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return std::string(s.rbegin(), s.rend());
}

bool i128_add_ok(i128 a, i128 b, i128& out) {
  return !__builtin_add_overflow(a, b, &out);
}

bool i128_mul_ok(i128 a, i128 b, i128& out) {
  return !__builtin_mul_overflow(a, b, &out);
}

i128 i128_parse(const std::string& s) {
  if (s.empty()) throw Error("empty integer literal");
  size_t i = 0;
  bool neg = false;
  if (s[0] == '-') { neg = true; i = 1; }
  if (i >= s.size()) throw Error("bad integer literal: " + s);
  i128 v = 0;
  for (; i < s.size(); i++) {
    if (s[i] < '0' || s[i] > '9') throw Error("bad integer literal: " + s);
    i128 nv;
    if (!i128_mul_ok(v, 10, nv) || !i128_add_ok(nv, s[i] - '0', nv))
      throw Error("integer literal out of range: " + s);
    v = nv;
  }
  return neg ? -v : v;
}

}  // namespace ebv
