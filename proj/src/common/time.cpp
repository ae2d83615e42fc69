#include "pcve/common/time.hpp"

#include <cstdio>

#include "pcve/common/error.hpp"

namespace pcve {

namespace {

using namespace std::chrono;

class Cursor {
public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }

  int digits(std::size_t count) {
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
      char c = peek();
      if (c < '0' || c > '9') bad();
      value = value * 10 + (c - '0');
      ++pos_;
    }
    return value;
  }

  void expect(char c) {
    if (peek() != c) bad();
    ++pos_;
  }

  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void bad() const {
    fail(ErrorKind::InvalidArgument, "unparseable timestamp '" + std::string(text_) + "'");
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Timestamp Timestamp::from_unix(std::int64_t seconds) { return Timestamp(Seconds(std::chrono::seconds(seconds))); }

Timestamp Timestamp::from_date(int year, unsigned month, unsigned day) {
  year_month_day ymd{std::chrono::year(year), std::chrono::month(month), std::chrono::day(day)};
  if (!ymd.ok()) {
    fail(ErrorKind::InvalidArgument, "invalid calendar date");
  }
  return Timestamp(Seconds(sys_days(ymd)));
}

Timestamp Timestamp::parse(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  Cursor in(text);
  int y = in.digits(4);
  in.expect('-');
  int mo = in.digits(2);
  in.expect('-');
  int d = in.digits(2);
  int h = 0, mi = 0, s = 0;
  if (in.accept('T') || in.accept(' ')) {
    h = in.digits(2);
    in.expect(':');
    mi = in.digits(2);
    if (in.accept(':')) {
      s = in.digits(2);
      if (in.accept('.')) {
        while (in.peek() >= '0' && in.peek() <= '9') in.digits(1);
      }
    }
  }
  std::int64_t offset = 0;
  if (in.accept('Z')) {
  } else if (in.peek() == '+' || in.peek() == '-') {
    int sign = in.peek() == '-' ? -1 : 1;
    in.accept(in.peek());
    int oh = in.digits(2);
    in.accept(':');
    int om = in.digits(2);
    offset = sign * (oh * 3600 + om * 60);
  }
  if (!in.done()) in.bad();
  if (h > 23 || mi > 59 || s > 60) in.bad();

  year_month_day ymd{std::chrono::year(y), std::chrono::month(static_cast<unsigned>(mo)),
                     std::chrono::day(static_cast<unsigned>(d))};
  if (!ymd.ok()) in.bad();
  auto at = sys_days(ymd) + hours(h) + minutes(mi) + seconds(s) - seconds(offset);
  return Timestamp(time_point_cast<seconds>(at));
}

int Timestamp::year() const {
  year_month_day ymd{floor<days>(at_)};
  return static_cast<int>(ymd.year());
}

std::string Timestamp::iso8601() const {
  auto day = floor<days>(at_);
  year_month_day ymd{day};
  hh_mm_ss hms{at_ - day};
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

std::string Timestamp::date_string() const { return iso8601().substr(0, 10); }

Timestamp Timestamp::plus_days(std::int64_t n) const { return Timestamp(at_ + days(n)); }

std::int64_t floor_days_between(Timestamp earlier, Timestamp later) {
  constexpr std::int64_t kDay = 86400;
  std::int64_t diff = later.unix_seconds() - earlier.unix_seconds();
  std::int64_t q = diff / kDay;
  if (diff % kDay != 0 && diff < 0) --q;
  return q;
}

}  // namespace pcve
