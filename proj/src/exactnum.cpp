#include "walras/exactnum.hpp"

#include <cctype>
#include <cmath>

namespace walras {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

mpz_class pow_z(const mpz_class& b, unsigned long k) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), k);
  return out;
}

}  // namespace

Rat parse_rat(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  std::string_view body = text;
  bool neg = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    neg = body.front() == '-';
    body.remove_prefix(1);
  }
  Rat out;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    std::string_view n = body.substr(0, slash), d = body.substr(slash + 1);
    if (!all_digits(n) || !all_digits(d))
      throw InvalidInput("malformed rational: '" + std::string(text) + "'");
    mpz_class den{std::string(d)};
    if (den == 0) throw InvalidInput("zero denominator: '" + std::string(text) + "'");
    out = Rat(mpz_class(std::string(n)), den);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    std::string_view ip = body.substr(0, dot), fp = body.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) ||
        (!fp.empty() && !all_digits(fp)))
      throw InvalidInput("malformed decimal: '" + std::string(text) + "'");
    mpz_class scale = pow_z(10, fp.size());
    mpz_class whole = ip.empty() ? mpz_class(0) : mpz_class(std::string(ip));
    mpz_class frac = fp.empty() ? mpz_class(0) : mpz_class(std::string(fp));
    out = Rat(whole * scale + frac, scale);
  } else {
    if (!all_digits(body))
      throw InvalidInput("malformed rational: '" + std::string(text) + "'");
    out = Rat(mpz_class(std::string(body)));
  }
  out.canonicalize();
  if (neg) out = -out;
  return out;
}

std::string to_string(const Rat& r) { return r.get_str(); }

Rat rat(long num, long den) {
  if (den == 0) throw InvalidInput("zero denominator");
  Rat r{mpz_class(num), mpz_class(den)};
  r.canonicalize();
  return r;
}

LexScalar::LexScalar(Rat base, Rat logarg) : base_(std::move(base)), logarg_(std::move(logarg)) {
  base_.canonicalize();
  logarg_.canonicalize();
  if (sgn(logarg_) <= 0) throw InvalidInput("LexScalar logarg must be positive");
}

LexScalar LexScalar::operator+(const LexScalar& o) const {
  return LexScalar(Rat(base_ + o.base_), Rat(logarg_ * o.logarg_));
}

LexScalar LexScalar::operator-(const LexScalar& o) const {
  return LexScalar(Rat(base_ - o.base_), Rat(logarg_ / o.logarg_));
}

LexScalar LexScalar::operator-() const { return LexScalar(Rat(-base_), Rat(1 / logarg_)); }

LexScalar& LexScalar::operator+=(const LexScalar& o) { return *this = *this + o; }
LexScalar& LexScalar::operator-=(const LexScalar& o) { return *this = *this - o; }

LexScalar LexScalar::scaled(long k) const {
  unsigned long a = k < 0 ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
  Rat lg(pow_z(logarg_.get_num(), a), pow_z(logarg_.get_den(), a));
  LexScalar out(Rat(base_ * static_cast<long>(a)), lg);
  return k < 0 ? -out : out;
}

std::strong_ordering LexScalar::operator<=>(const LexScalar& o) const {
  int c = cmp(base_, o.base_);
  if (c == 0) c = cmp(logarg_, o.logarg_);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

double LexScalar::approx(double gamma) const {
  return base_.get_d() + gamma * std::log(logarg_.get_d());
}

std::string LexScalar::str() const {
  return "(" + to_string(base_) + ", " + to_string(logarg_) + ")";
}

LexScalar lex_from_slope(const Rat& q_prime) {
  if (sgn(q_prime) <= 0) throw InvalidInput("slope must be positive, got " + to_string(q_prime));
  return LexScalar(Rat(1), Rat(1 / q_prime));
}

std::strong_ordering lex_compare(const LexScalar& x, const LexScalar& y) { return x <=> y; }

LexScalar lex_sum(const std::vector<LexScalar>& items) {
  LexScalar acc;
  for (const auto& it : items) acc += it;
  return acc;
}

}  // namespace walras
