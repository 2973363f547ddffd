#include "mpg/lp.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <stdexcept>

namespace mpg::lp {

namespace {

std::atomic<std::uint64_t> g_solves{0}, g_feasible{0}, g_infeasible{0},
    g_verify_failures{0}, g_big_fallbacks{0};

struct Overflow {};

// Fast exact rational on int64 with __int128 intermediates. Throws Overflow
// when a reduced value no longer fits; the caller retries with GMP.
struct Rat64 {
  long long n = 0;
  long long d = 1;

  Rat64() = default;
  Rat64(long long num) : n(num), d(1) {}

  static Rat64 make(__int128 num, __int128 den) {
    if (den == 0) throw std::logic_error("Rat64 zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    if (num == 0) return Rat64(0);
    unsigned __int128 x = num < 0 ? static_cast<unsigned __int128>(-num)
                                  : static_cast<unsigned __int128>(num);
    unsigned __int128 y = static_cast<unsigned __int128>(den);
    while (y != 0) {
      unsigned __int128 t = x % y;
      x = y;
      y = t;
    }
    num /= static_cast<__int128>(x);
    den /= static_cast<__int128>(x);
    constexpr __int128 kMax = __int128(0x7fffffffffffffffLL);
    if (num > kMax || num < -kMax || den > kMax) throw Overflow{};
    Rat64 r;
    r.n = static_cast<long long>(num);
    r.d = static_cast<long long>(den);
    return r;
  }

  bool is_zero() const { return n == 0; }
  bool is_neg() const { return n < 0; }
  bool is_pos() const { return n > 0; }

  friend Rat64 operator+(const Rat64& a, const Rat64& b) {
    return make(static_cast<__int128>(a.n) * b.d +
                    static_cast<__int128>(b.n) * a.d,
                static_cast<__int128>(a.d) * b.d);
  }
  friend Rat64 operator-(const Rat64& a, const Rat64& b) {
    return make(static_cast<__int128>(a.n) * b.d -
                    static_cast<__int128>(b.n) * a.d,
                static_cast<__int128>(a.d) * b.d);
  }
  friend Rat64 operator*(const Rat64& a, const Rat64& b) {
    return make(static_cast<__int128>(a.n) * b.n,
                static_cast<__int128>(a.d) * b.d);
  }
  friend Rat64 operator/(const Rat64& a, const Rat64& b) {
    if (b.n == 0) throw std::logic_error("Rat64 division by zero");
    return make(static_cast<__int128>(a.n) * b.d,
                static_cast<__int128>(a.d) * b.n);
  }
  Rat64 operator-() const {
    Rat64 r;
    r.n = -n;
    r.d = d;
    return r;
  }
  // a < b  <=>  a.n*b.d < b.n*a.d (denominators positive)
  friend bool operator<(const Rat64& a, const Rat64& b) {
    return static_cast<__int128>(a.n) * b.d < static_cast<__int128>(b.n) * a.d;
  }
};

struct NumTraitsRat64 {
  using Q = Rat64;
  static Q from_rat(const Rat& r) {
    if (!r.get_num().fits_slong_p() || !r.get_den().fits_slong_p()) {
      throw Overflow{};
    }
    Q q;
    q.n = r.get_num().get_si();
    q.d = r.get_den().get_si();
    return q;
  }
  static Rat to_rat(const Q& q) {
    Rat r(static_cast<long>(q.n), static_cast<long>(q.d));
    r.canonicalize();
    return r;
  }
  static bool is_zero(const Q& q) { return q.n == 0; }
  static bool is_neg(const Q& q) { return q.n < 0; }
  static bool is_pos(const Q& q) { return q.n > 0; }
};

struct NumTraitsBig {
  using Q = Rat;
  static Q from_rat(const Rat& r) { return r; }
  static Rat to_rat(const Q& q) { return q; }
  static bool is_zero(const Q& q) { return sgn(q) == 0; }
  static bool is_neg(const Q& q) { return sgn(q) < 0; }
  static bool is_pos(const Q& q) { return sgn(q) > 0; }
};

// Canonical form shared by both kernels: each free variable x_i split into
// x_i = p_i - m_i with p,m >= 0 (columns 2i, 2i+1).
struct CanonRow {
  std::vector<std::pair<int, Rat>> coeffs;  // over original variables
  Rel rel;
  Rat rhs;
};

// Full-tableau simplex with Bland's anti-cycling rule.
template <class Traits>
class Simplex {
 public:
  using Q = typename Traits::Q;

  Simplex(const System& sys) : nvars_(static_cast<int>(sys.vars.size())) {
    m_ = static_cast<int>(sys.rows.size());
    nsplit_ = 2 * nvars_;
    // Column layout: [split vars | slacks | artificials], built row by row.
    ncols_ = nsplit_;
    rows_.assign(m_, {});
    rhs_.assign(m_, Q(0));
    basis_.assign(m_, -1);
    std::vector<int> slack_col(m_, -1);
    std::vector<int> slack_sign(m_, 0);
    for (int r = 0; r < m_; ++r) {
      if (sys.rows[r].rel != Rel::Eq) {
        slack_col[r] = ncols_++;
        slack_sign[r] = sys.rows[r].rel == Rel::Le ? 1 : -1;
      }
    }
    first_artificial_ = ncols_;
    std::vector<int> art_col(m_, -1);
    // Dense rows.
    for (int r = 0; r < m_; ++r) {
      rows_[r].assign(ncols_, Q(0));
      for (const auto& [v, c] : sys.rows[r].coeffs) {
        Q q = Traits::from_rat(c);
        rows_[r][2 * v] = rows_[r][2 * v] + q;
        rows_[r][2 * v + 1] = rows_[r][2 * v + 1] - q;
      }
      if (slack_col[r] != -1) {
        rows_[r][slack_col[r]] = Q(slack_sign[r]);
      }
      rhs_[r] = Traits::from_rat(sys.rows[r].rhs);
      bool neg = Traits::is_neg(rhs_[r]);
      if (neg) {
        for (Q& q : rows_[r]) q = -q;
        rhs_[r] = -rhs_[r];
      }
      int sc = slack_col[r];
      bool slack_is_basic =
          sc != -1 && Traits::is_pos(rows_[r][sc]);
      if (slack_is_basic) {
        basis_[r] = sc;
      } else {
        art_col[r] = static_cast<int>(ncols_);
        basis_[r] = ncols_;
        for (int rr = 0; rr < m_; ++rr) {
          rows_[rr].push_back(Q(rr == r ? 1 : 0));
        }
        ++ncols_;
      }
    }
    active_row_.assign(m_, 1);
  }

  // Phase 1: minimize the sum of artificials. Returns true iff feasible.
  bool phase1() {
    std::vector<Q> red(ncols_, Q(0));
    Q val(0);
    for (int j = first_artificial_; j < ncols_; ++j) red[j] = Q(1);
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] >= first_artificial_) {
        for (int j = 0; j < ncols_; ++j) red[j] = red[j] - rows_[r][j];
        val = val + rhs_[r];
      }
    }
    // val currently holds the objective (sum of artificial basics).
    while (true) {
      int enter = -1;
      for (int j = 0; j < ncols_; ++j) {
        if (Traits::is_neg(red[j])) {
          enter = j;
          break;
        }
      }
      if (enter == -1) break;
      int leave = pick_leaving(enter);
      if (leave == -1) {
        // Phase-1 objective is bounded below by 0; unbounded is impossible.
        throw std::logic_error("phase-1 unbounded");
      }
      Q ratio = rhs_[leave] / rows_[leave][enter];
      val = val + red[enter] * ratio;
      pivot(leave, enter, &red);
    }
    if (Traits::is_pos(val)) return false;
    // Drive leftover zero-level artificials out of the basis, or drop
    // redundant rows.
    for (int r = 0; r < m_; ++r) {
      if (!active_row_[r] || basis_[r] < first_artificial_) continue;
      int piv = -1;
      for (int j = 0; j < first_artificial_; ++j) {
        if (!Traits::is_zero(rows_[r][j])) {
          piv = j;
          break;
        }
      }
      if (piv == -1) {
        active_row_[r] = 0;
      } else {
        pivot(r, piv, nullptr);
      }
    }
    return true;
  }

  // Phase 2: maximize sum(c_j * col_j) over split columns; artificials are
  // barred from entering. Early-exits as soon as the objective is positive
  // when early_positive is set. Returns +1 objective-positive (attained or
  // unbounded), 0 optimal with objective <= 0 reached.
  int maximize(const std::vector<Q>& c, bool early_positive) {
    std::vector<Q> red = c;
    red.resize(ncols_, Q(0));
    Q val(0);
    for (int r = 0; r < m_; ++r) {
      if (!active_row_[r]) continue;
      int b = basis_[r];
      if (b < static_cast<int>(c.size()) && !Traits::is_zero(c[b])) {
        Q f = c[b];
        for (int j = 0; j < ncols_; ++j) red[j] = red[j] - f * rows_[r][j];
        val = val + f * rhs_[r];
      }
    }
    if (early_positive && Traits::is_pos(val)) return 1;
    while (true) {
      int enter = -1;
      for (int j = 0; j < first_artificial_; ++j) {
        if (Traits::is_pos(red[j])) {
          enter = j;
          break;
        }
      }
      if (enter == -1) return Traits::is_pos(val) ? 1 : 0;
      int leave = pick_leaving(enter);
      if (leave == -1) return 1;  // unbounded above, hence positive values
      Q ratio = rhs_[leave] / rows_[leave][enter];
      val = val + red[enter] * ratio;
      pivot(leave, enter, &red);
      if (early_positive && Traits::is_pos(val)) return 1;
    }
  }

  std::vector<Rat> solution() const {
    std::vector<Q> col_val(ncols_, Q(0));
    for (int r = 0; r < m_; ++r) {
      if (active_row_[r]) col_val[basis_[r]] = rhs_[r];
    }
    std::vector<Rat> x(nvars_);
    for (int v = 0; v < nvars_; ++v) {
      x[v] = Traits::to_rat(col_val[2 * v]) - Traits::to_rat(col_val[2 * v + 1]);
    }
    return x;
  }

 private:
  int pick_leaving(int enter) const {
    int leave = -1;
    for (int r = 0; r < m_; ++r) {
      if (!active_row_[r] || !Traits::is_pos(rows_[r][enter])) continue;
      if (leave == -1) {
        leave = r;
        continue;
      }
      // Compare rhs_[r]/rows_[r][enter] with current best; Bland tie-break
      // on the smallest basis column.
      Q lhs = rhs_[r] * rows_[leave][enter];
      Q rhs = rhs_[leave] * rows_[r][enter];
      if (lhs < rhs || (!(rhs < lhs) && basis_[r] < basis_[leave])) {
        leave = r;
      }
    }
    return leave;
  }

  void pivot(int r, int j, std::vector<Q>* red) {
    Q p = rows_[r][j];
    for (Q& q : rows_[r]) q = q / p;
    rhs_[r] = rhs_[r] / p;
    for (int rr = 0; rr < m_; ++rr) {
      if (rr == r || Traits::is_zero(rows_[rr][j])) continue;
      Q f = rows_[rr][j];
      for (int jj = 0; jj < ncols_; ++jj) {
        rows_[rr][jj] = rows_[rr][jj] - f * rows_[r][jj];
      }
      rhs_[rr] = rhs_[rr] - f * rhs_[r];
    }
    if (red && !Traits::is_zero((*red)[j])) {
      Q f = (*red)[j];
      for (int jj = 0; jj < ncols_; ++jj) {
        (*red)[jj] = (*red)[jj] - f * rows_[r][jj];
      }
    }
    basis_[r] = j;
  }

  int nvars_, nsplit_, m_, ncols_ = 0, first_artificial_ = 0;
  std::vector<std::vector<Q>> rows_;
  std::vector<Q> rhs_;
  std::vector<int> basis_;
  std::vector<char> active_row_;
};

template <class Traits>
std::optional<std::vector<Rat>> run_feasibility(const System& sys) {
  Simplex<Traits> sx(sys);
  if (!sx.phase1()) return std::nullopt;
  return sx.solution();
}

std::optional<std::vector<Rat>> feasibility_point(const System& sys) {
  try {
    return run_feasibility<NumTraitsRat64>(sys);
  } catch (const Overflow&) {
    g_big_fallbacks.fetch_add(1, std::memory_order_relaxed);
    return run_feasibility<NumTraitsBig>(sys);
  }
}

// Farkas multipliers via the Motzkin alternative system. Rewrite every row
// in >=-form (Le negated; Eq split into both directions); infeasibility of
// the primal is equivalent to feasibility of {mu >= 0; sum mu_r g_r = 0;
// sum mu_r h_r >= 1}. The found mu maps back to sign-correct per-row
// multipliers.
std::vector<Rat> compute_farkas(const System& sys) {
  struct ExpRow {
    int orig;
    int sign;  // +1: as-is (Ge), -1: negated (Le); Eq contributes both
  };
  std::vector<ExpRow> exp;
  for (int r = 0; r < static_cast<int>(sys.rows.size()); ++r) {
    switch (sys.rows[r].rel) {
      case Rel::Ge:
        exp.push_back({r, 1});
        break;
      case Rel::Le:
        exp.push_back({r, -1});
        break;
      case Rel::Eq:
        exp.push_back({r, 1});
        exp.push_back({r, -1});
        break;
    }
  }
  System alt;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    alt.add_var("mu" + std::to_string(i));
  }
  // Per original variable: sum_e mu_e * g_e[v] = 0.
  std::vector<std::vector<std::pair<int, Rat>>> col(sys.vars.size());
  for (std::size_t i = 0; i < exp.size(); ++i) {
    const Constraint& row = sys.rows[exp[i].orig];
    for (const auto& [v, c] : row.coeffs) {
      col[v].push_back({static_cast<int>(i), exp[i].sign * c});
    }
  }
  for (std::size_t v = 0; v < sys.vars.size(); ++v) {
    alt.add(col[v], Rel::Eq, 0);
  }
  std::vector<std::pair<int, Rat>> rhs_row;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    Rat h = exp[i].sign * sys.rows[exp[i].orig].rhs;
    if (sgn(h) != 0) rhs_row.push_back({static_cast<int>(i), h});
    alt.add({{static_cast<int>(i), Rat(1)}}, Rel::Ge, 0);
  }
  alt.add(rhs_row, Rel::Ge, 1);
  auto mu = feasibility_point(alt);
  if (!mu) {
    // By LP duality this cannot happen for a genuinely infeasible primal;
    // flagged via the verification counter by the caller.
    return {};
  }
  std::vector<Rat> far(sys.rows.size(), Rat(0));
  for (std::size_t i = 0; i < exp.size(); ++i) {
    far[exp[i].orig] += Rat(exp[i].sign) * (*mu)[i];
  }
  return far;
}

}  // namespace

int System::add_var(std::string name) {
  vars.push_back(std::move(name));
  return static_cast<int>(vars.size()) - 1;
}

void System::add(std::vector<std::pair<int, Rat>> coeffs, Rel rel, Rat rhs) {
  for (const auto& [v, c] : coeffs) {
    if (v < 0 || v >= static_cast<int>(vars.size())) {
      throw std::invalid_argument("constraint references unknown variable");
    }
    (void)c;
  }
  rows.push_back({std::move(coeffs), rel, std::move(rhs)});
}

bool check_assignment(const System& sys, const std::vector<Rat>& assignment) {
  if (assignment.size() != sys.vars.size()) return false;
  for (const Constraint& row : sys.rows) {
    Rat lhs(0);
    for (const auto& [v, c] : row.coeffs) lhs += c * assignment[v];
    int cmp = mpq_cmp(lhs.get_mpq_t(), row.rhs.get_mpq_t());
    if (row.rel == Rel::Le && cmp > 0) return false;
    if (row.rel == Rel::Ge && cmp < 0) return false;
    if (row.rel == Rel::Eq && cmp != 0) return false;
  }
  return true;
}

bool check_farkas(const System& sys, const std::vector<Rat>& farkas) {
  if (farkas.size() != sys.rows.size()) return false;
  std::vector<Rat> combined(sys.vars.size(), Rat(0));
  Rat rhs(0);
  for (std::size_t r = 0; r < sys.rows.size(); ++r) {
    const Constraint& row = sys.rows[r];
    int s = sgn(farkas[r]);
    if (row.rel == Rel::Ge && s < 0) return false;
    if (row.rel == Rel::Le && s > 0) return false;
    if (s == 0) continue;
    for (const auto& [v, c] : row.coeffs) combined[v] += farkas[r] * c;
    rhs += farkas[r] * row.rhs;
  }
  for (const Rat& c : combined) {
    if (sgn(c) != 0) return false;
  }
  return sgn(rhs) > 0;
}

FeasibilityResult solve_feasibility(const System& sys) {
  g_solves.fetch_add(1, std::memory_order_relaxed);
  FeasibilityResult res;
  auto point = feasibility_point(sys);
  if (point) {
    res.verdict = Verdict::Feasible;
    res.assignment = std::move(*point);
    g_feasible.fetch_add(1, std::memory_order_relaxed);
    if (!check_assignment(sys, res.assignment)) {
      g_verify_failures.fetch_add(1, std::memory_order_relaxed);
    }
  } else {
    res.verdict = Verdict::Infeasible;
    res.farkas = compute_farkas(sys);
    g_infeasible.fetch_add(1, std::memory_order_relaxed);
    if (!check_farkas(sys, res.farkas)) {
      g_verify_failures.fetch_add(1, std::memory_order_relaxed);
    }
  }
  return res;
}

namespace {

template <class Traits>
std::vector<int> run_support(const System& sys,
                             std::vector<std::vector<Rat>>* witnesses) {
  Simplex<Traits> sx(sys);
  if (!sx.phase1()) {
    throw std::invalid_argument("support_vars: system infeasible");
  }
  int n = static_cast<int>(sys.vars.size());
  std::vector<char> positive(n, 0);
  std::vector<std::vector<Rat>> points;
  auto absorb = [&](std::vector<Rat> x) {
    bool used = false;
    for (int v = 0; v < n; ++v) {
      if (!positive[v] && sgn(x[v]) > 0) {
        positive[v] = 1;
        used = true;
      }
    }
    if (used) points.push_back(std::move(x));
  };
  absorb(sx.solution());
  using Q = typename Traits::Q;
  for (int v = 0; v < n; ++v) {
    if (positive[v]) continue;
    std::vector<Q> c(2 * n, Q(0));
    c[2 * v] = Q(1);
    c[2 * v + 1] = Q(-1);
    if (sx.maximize(c, /*early_positive=*/true) == 1) {
      std::vector<Rat> x = sx.solution();
      if (sgn(x[v]) > 0) {
        absorb(std::move(x));
      } else {
        // The probe stopped on an unbounded ray before v itself went
        // positive; sup over v is +infinity, so v >= 1 is feasible.
        System bounded = sys;
        bounded.add({{v, Rat(1)}}, Rel::Ge, 1);
        auto pt = feasibility_point(bounded);
        if (!pt) throw std::logic_error("support probe ray inconsistent");
        absorb(std::move(*pt));
      }
    }
  }
  std::vector<int> result;
  for (int v = 0; v < n; ++v) {
    if (positive[v]) result.push_back(v);
  }
  if (witnesses) *witnesses = std::move(points);
  return result;
}

}  // namespace

std::vector<int> support_vars(const System& sys,
                              std::vector<std::vector<Rat>>* witnesses) {
  try {
    return run_support<NumTraitsRat64>(sys, witnesses);
  } catch (const Overflow&) {
    g_big_fallbacks.fetch_add(1, std::memory_order_relaxed);
    return run_support<NumTraitsBig>(sys, witnesses);
  }
}

Stats stats() {
  Stats s;
  s.solves = g_solves.load();
  s.feasible = g_feasible.load();
  s.infeasible = g_infeasible.load();
  s.verify_failures = g_verify_failures.load();
  s.big_kernel_fallbacks = g_big_fallbacks.load();
  return s;
}

void reset_stats() {
  g_solves = 0;
  g_feasible = 0;
  g_infeasible = 0;
  g_verify_failures = 0;
  g_big_fallbacks = 0;
}

}  // namespace mpg::lp
