#pragma once

#include <gmpxx.h>

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace walras {

using Rat = mpq_class;

// Error taxonomy shared by all modules.
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};
struct ModelViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct WrongMode : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotSeparable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Accepts "a", "a/b" and decimal literals such as "-1.25".
Rat parse_rat(std::string_view text);
std::string to_string(const Rat& r);
Rat rat(long num, long den = 1);
inline int sign(const Rat& r) { return sgn(r); }

// The value base + gamma * log(logarg) for an infinitesimal gamma > 0.
class LexScalar {
 public:
  LexScalar() : base_(0), logarg_(1) {}
  LexScalar(Rat base, Rat logarg);

  static LexScalar zero() { return LexScalar(); }
  static LexScalar constant(const Rat& a) { return LexScalar(a, Rat(1)); }

  const Rat& base() const { return base_; }
  const Rat& logarg() const { return logarg_; }

  LexScalar operator+(const LexScalar& o) const;
  LexScalar operator-(const LexScalar& o) const;
  LexScalar operator-() const;
  LexScalar& operator+=(const LexScalar& o);
  LexScalar& operator-=(const LexScalar& o);
  // Integer multiple; negative k means the negated multiple.
  LexScalar scaled(long k) const;

  bool operator==(const LexScalar& o) const {
    return base_ == o.base_ && logarg_ == o.logarg_;
  }
  std::strong_ordering operator<=>(const LexScalar& o) const;

  // Numeric value for a concrete gamma; diagnostics and tests only.
  double approx(double gamma) const;
  std::string str() const;

 private:
  Rat base_;
  Rat logarg_;
};

LexScalar lex_from_slope(const Rat& q_prime);
std::strong_ordering lex_compare(const LexScalar& x, const LexScalar& y);
LexScalar lex_sum(const std::vector<LexScalar>& items);

}  // namespace walras
